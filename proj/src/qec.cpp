#include "qdot/qec.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <set>

#include "qdot/constants.hpp"

namespace qdot {

char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

std::optional<Pauli> pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: return std::nullopt;
  }
}

Operator<double> pauli_matrix(Pauli p) {
  switch (p) {
    case Pauli::I: return Operator<double>::Identity(2, 2);
    case Pauli::X: return gate_matrix<double>(gates::x(0));
    case Pauli::Y: return gate_matrix<double>(gates::y(0));
    case Pauli::Z: return gate_matrix<double>(gates::z(0));
  }
  throw std::logic_error("bad Pauli");
}

Pauli pauli_product(Pauli a, Pauli b) {
  // X = 01, Z = 10, Y = 11 in (z, x) bits
  auto bits = [](Pauli p) {
    switch (p) {
      case Pauli::I: return 0;
      case Pauli::X: return 1;
      case Pauli::Z: return 2;
      case Pauli::Y: return 3;
    }
    return 0;
  };
  static constexpr Pauli kFromBits[4] = {Pauli::I, Pauli::X, Pauli::Z, Pauli::Y};
  return kFromBits[bits(a) ^ bits(b)];
}

void LogicalQubit::validate(int n_qubits) const {
  std::set<int> ids;
  for (int k = 0; k < 5; ++k) {
    const int q = qubit(k);
    if (q < 0 || q >= n_qubits) throw QecError("logical qubit index " + std::to_string(q) + " out of range");
    if (!ids.insert(q).second) throw QecError("logical qubit indices must be distinct");
  }
}

namespace {

void push_cz(std::vector<Gate>& out, int c, int t) {
  out.push_back(gates::h(t));
  out.push_back(gates::cnot(c, t));
  out.push_back(gates::h(t));
}

void push_cy(std::vector<Gate>& out, int c, int t) {
  out.push_back(gates::z(t));  // S Z = S^dagger
  out.push_back(gates::s(t));
  out.push_back(gates::cnot(c, t));
  out.push_back(gates::s(t));
}

void apply_pauli(State& state, Pauli p, int q) {
  switch (p) {
    case Pauli::I: return;
    case Pauli::X: state.apply(gates::x(q)); return;
    case Pauli::Y: state.apply(gates::y(q)); return;
    case Pauli::Z: state.apply(gates::z(q)); return;
  }
}

void require_ground(const State& state, int q, const char* what) {
  if (outcome_probability(state, q, Basis::Z, 1) > 1e-9)
    throw QecError(std::string(what) + ": qubit " + std::to_string(q) + " is not in |0>");
}

Operator<double> embed(const Operator<double>& single, int q, int n) {
  const Eigen::Index d = Eigen::Index(1) << n;
  const int shift = n - 1 - q;
  Operator<double> out = Operator<double>::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if ((i & ~(Eigen::Index(1) << shift)) == (j & ~(Eigen::Index(1) << shift)))
        out(i, j) = single((i >> shift) & 1, (j >> shift) & 1);
  return out;
}

bool anticommute(const Operator<double>& a, const Operator<double>& b) {
  return (a * b + b * a).cwiseAbs().maxCoeff() < 1e-9;
}

}  // namespace

std::vector<Gate> encoder_circuit(const LogicalQubit& lq) {
  const auto q = [&](int k) { return lq.qubit(k); };
  std::vector<Gate> c;
  c.push_back(gates::z(q(0)));
  push_cz(c, q(0), q(1));
  push_cz(c, q(0), q(4));

  c.push_back(gates::h(q(1)));
  c.push_back(gates::s(q(1)));
  push_cy(c, q(1), q(0));
  push_cz(c, q(1), q(2));
  push_cz(c, q(1), q(4));

  c.push_back(gates::h(q(2)));
  c.push_back(gates::cnot(q(2), q(0)));
  push_cz(c, q(2), q(3));
  push_cz(c, q(2), q(4));

  c.push_back(gates::h(q(3)));
  c.push_back(gates::cnot(q(3), q(0)));
  push_cz(c, q(3), q(1));
  push_cz(c, q(3), q(2));

  c.push_back(gates::h(q(4)));
  c.push_back(gates::s(q(4)));
  push_cy(c, q(4), q(0));
  push_cz(c, q(4), q(1));
  push_cz(c, q(4), q(3));
  return c;
}

const Operator<double>& encoder_unitary() {
  static const Operator<double> u = [] {
    const LogicalQubit lq{0, {1, 2, 3, 4}, false};
    const auto circuit = encoder_circuit(lq);
    Operator<double> m(32, 32);
    for (Eigen::Index col = 0; col < 32; ++col) {
      State s = State::basis(5, static_cast<std::uint64_t>(col));
      for (const Gate& g : circuit) s.apply(g);
      m.col(col) = s.amplitudes();
    }
    return m;
  }();
  return u;
}

void encode5(State& state, LogicalQubit& lq) {
  lq.validate(state.n_qubits());
  if (lq.encoded) throw QecError("logical qubit is already encoded");
  for (int q : lq.syndrome) require_ground(state, q, "encode5");
  for (const Gate& g : encoder_circuit(lq)) state.apply(g);
  lq.encoded = true;
}

void decode5(State& state, LogicalQubit& lq) {
  lq.validate(state.n_qubits());
  if (!lq.encoded) throw QecError("decode5 needs an encoded logical qubit");
  const auto circuit = encoder_circuit(lq);
  for (auto it = circuit.rbegin(); it != circuit.rend(); ++it)
    state.apply_operator(gate_matrix<double>(*it).adjoint(), it->targets);
  lq.encoded = false;
}

const std::map<std::uint8_t, SyndromeEntry>& syndrome_table() {
  static const std::map<std::uint8_t, SyndromeEntry> table = [] {
    const Operator<double>& u = encoder_unitary();
    const Operator<double> z = pauli_matrix(Pauli::Z);
    std::array<Operator<double>, 4> checks;
    for (int j = 0; j < 4; ++j) checks[j] = u * embed(z, j + 1, 5) * u.adjoint();
    const Operator<double> logical_z = u * embed(z, 0, 5) * u.adjoint();
    const Operator<double> logical_x = u * embed(pauli_matrix(Pauli::X), 0, 5) * u.adjoint();
    std::map<std::uint8_t, SyndromeEntry> t;
    t[0] = SyndromeEntry{};
    for (int pos = 0; pos < 5; ++pos)
      for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
        const Operator<double> e = embed(pauli_matrix(p), pos, 5);
        std::uint8_t s = 0;
        for (int j = 0; j < 4; ++j)
          if (anticommute(e, checks[j])) s |= static_cast<std::uint8_t>(1u << (3 - j));
        const bool flip = anticommute(e, logical_z);
        const bool phase = anticommute(e, logical_x);
        const Pauli corr = flip && phase ? Pauli::Y : flip ? Pauli::X : phase ? Pauli::Z : Pauli::I;
        if (t.count(s)) throw std::logic_error("syndrome collision in the five-qubit code table");
        t[s] = SyndromeEntry{p, pos, corr};
      }
    return t;
  }();
  return table;
}

std::string syndrome_bits(std::uint8_t s) {
  std::string out;
  for (int j = 3; j >= 0; --j) out.push_back(((s >> j) & 1) ? '1' : '0');
  return out;
}

QecCycleReport qec_cycle(State& state, LogicalQubit& lq, std::span<const InjectedError> errors, Rng& rng) {
  lq.validate(state.n_qubits());
  if (!lq.encoded) throw QecError("qec_cycle needs an encoded logical qubit");
  QecCycleReport r;
  std::array<Pauli, 5> net{};
  net.fill(Pauli::I);
  for (const auto& e : errors) {
    if (e.position < 0 || e.position > 4) throw QecError("injected error position must be 0..4");
    apply_pauli(state, e.pauli, lq.qubit(e.position));
    net[static_cast<std::size_t>(e.position)] = pauli_product(net[static_cast<std::size_t>(e.position)], e.pauli);
  }
  for (Pauli p : net) r.injected_weight += p != Pauli::I;
  r.possible_logical_error = r.injected_weight >= 2;

  decode5(state, lq);
  for (int j = 0; j < 4; ++j) {
    const int q = lq.syndrome[static_cast<std::size_t>(j)];
    auto m = measure(state, q, Basis::Z, rng);
    state = std::move(m.state);
    if (m.outcome) {
      r.syndrome |= static_cast<std::uint8_t>(1u << (3 - j));
      state.apply(gates::x(q));
    }
  }
  r.diagnosis = syndrome_table().at(r.syndrome);
  apply_pauli(state, r.diagnosis.correction, lq.principal);
  encode5(state, lq);
  r.pulse_count = cycle_pulse_count().total();
  return r;
}

Json to_json(const QecCycleReport& r) {
  Json j;
  j["syndrome"] = syndrome_bits(r.syndrome);
  j["diagnosed_error"] = std::string(1, to_char(r.diagnosis.error));
  j["diagnosed_position"] = r.diagnosis.position;
  j["correction"] = std::string(1, to_char(r.diagnosis.correction));
  j["injected_weight"] = r.injected_weight;
  j["possible_logical_error"] = r.possible_logical_error;
  j["pulse_count"] = r.pulse_count;
  return j;
}

CyclePulseCount cycle_pulse_count() {
  const LogicalQubit lq{0, {1, 2, 3, 4}, false};
  int pulses = 0;
  for (const Gate& g : encoder_circuit(lq)) {
    if (gate_arity(g.kind) == 1) {
      pulses += 1;
    } else {
      const int hops = std::abs(g.targets[0] - g.targets[1]);
      pulses += static_cast<int>(compile_cnot(0, 1).size()) + 2 * (hops - 1);
    }
  }
  CyclePulseCount c;
  c.encode = pulses;
  c.decode = pulses;
  return c;
}

void make_cat(DotArray& array, std::span<const GridPos> qubits) {
  if (qubits.empty()) throw PhysicsError("make_cat needs at least one qubit");
  for (std::size_t i = 1; i < qubits.size(); ++i)
    if (!DotArray::adjacent(qubits[i - 1], qubits[i]))
      throw PhysicsError("cat-state qubits " + to_string(qubits[i - 1]) + " and " + to_string(qubits[i]) +
                         " are not neighbours");
  if (array.options().strict)
    for (GridPos p : qubits) require_ground(*array.state(), array.qubit_at(p), "make_cat");
  array.rabi_pulse(qubits[0], gates::h(0));
  for (std::size_t i = 1; i < qubits.size(); ++i) array.cnot(qubits[i - 1], qubits[i]);
}

void uncreate_cat(DotArray& array, std::span<const GridPos> qubits) {
  if (qubits.empty()) throw PhysicsError("uncreate_cat needs at least one qubit");
  for (std::size_t i = 1; i < qubits.size(); ++i)
    if (!DotArray::adjacent(qubits[i - 1], qubits[i]))
      throw PhysicsError("cat-state qubits are not a nearest-neighbour chain");
  for (std::size_t i = qubits.size() - 1; i >= 1; --i) array.cnot(qubits[i - 1], qubits[i]);
  array.rabi_pulse(qubits[0], gates::h(0));
}

ParityResult parity_measure(State state, std::span<const int> qubits, int ancilla, Rng& rng) {
  state.check_qubit(ancilla);
  for (int q : qubits) {
    state.check_qubit(q);
    if (q == ancilla) throw QecError("parity ancilla cannot be one of the measured qubits");
  }
  require_ground(state, ancilla, "parity_measure");
  for (int q : qubits) state.apply(gates::cnot(q, ancilla));
  auto m = measure(state, ancilla, Basis::Z, rng);
  if (m.outcome) m.state.apply(gates::x(ancilla));
  return {m.outcome, std::move(m.state)};
}

PulseBudget pulse_budget(const MaterialParams& m, int pulses_per_cycle) {
  if (pulses_per_cycle <= 0) throw std::invalid_argument("pulse_budget: pulses_per_cycle must be positive");
  if (!(m.t_pulse > 0)) throw std::invalid_argument("pulse_budget: t_pulse must be positive");
  if (!(m.noise.T2 > 0) || !std::isfinite(m.noise.T2)) throw std::invalid_argument("pulse_budget: T2 must be finite");
  PulseBudget b{pulses_per_cycle, m.t_pulse, m.noise.T2, pulses_per_cycle * m.t_pulse, 0};
  auto cycles = static_cast<std::int64_t>(std::floor(b.T2 / b.cycle_time));
  // A quotient that lands a rounding step below an integer still fits that many cycles.
  if (static_cast<double>(cycles + 1) * b.cycle_time <= b.T2 * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()))
    ++cycles;
  b.cycles_in_T2 = cycles;
  return b;
}

Json to_json(const PulseBudget& b) {
  Json j;
  j["pulses_per_cycle"] = b.pulses_per_cycle;
  j["t_pulse_s"] = b.t_pulse;
  j["T2_s"] = b.T2;
  j["cycle_time_s"] = b.cycle_time;
  j["cycles_in_T2"] = b.cycles_in_T2;
  return j;
}

QecRunReport run_qec(int cycles, double p, std::uint64_t seed) {
  if (cycles < 0) throw std::invalid_argument("run_qec: cycles must be >= 0");
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("run_qec: p must be in [0, 1]");
  QecRunReport r{cycles, p, seed, 0, 0.0, {}, cycle_pulse_count()};
  StateVector<double> payload(2);
  payload << 1.0, std::polar(1.0, constants::pi / 4);
  payload /= std::sqrt(2.0);
  StateVector<double> v = StateVector<double>::Zero(32);
  v(0) = payload(0);
  v(16) = payload(1);
  LogicalQubit lq{0, {1, 2, 3, 4}, false};
  State reference = State::from_vector(v);
  encode5(reference, lq);
  State state = reference;
  Rng rng(seed);
  const int pulses = r.pulses.total();
  for (int c = 0; c < cycles; ++c) {
    std::vector<InjectedError> errors;
    for (int k = 0; k < pulses; ++k)
      if (rng.bernoulli(p)) {
        const auto pauli = static_cast<Pauli>(1 + rng.below(3));
        errors.push_back({pauli, static_cast<int>(rng.below(5))});
      }
    const auto rep = qec_cycle(state, lq, errors, rng);
    ++r.syndrome_histogram[syndrome_bits(rep.syndrome)];
    if (state_fidelity(state, reference) < 1.0 - 1e-6) {
      ++r.logical_errors;
      state = reference;
    }
  }
  r.logical_error_rate = cycles > 0 ? static_cast<double>(r.logical_errors) / cycles : 0.0;
  return r;
}

Json to_json(const QecRunReport& r) {
  Json j;
  j["cycles"] = r.cycles;
  j["p"] = r.p;
  j["seed"] = r.seed;
  j["logical_errors"] = r.logical_errors;
  j["logical_error_rate"] = r.logical_error_rate;
  Json h = Json::object();
  for (const auto& [k, v] : r.syndrome_histogram) h[k] = v;
  j["syndrome_histogram"] = std::move(h);
  Json pc;
  pc["encode"] = r.pulses.encode;
  pc["decode"] = r.pulses.decode;
  pc["readout"] = r.pulses.readout;
  pc["correction"] = r.pulses.correction;
  pc["total"] = r.pulses.total();
  pc["reference_estimate"] = 500;
  pc["ratio_to_reference"] = r.pulses.total() / 500.0;
  j["pulses_per_cycle"] = std::move(pc);
  return j;
}

}  // namespace qdot
