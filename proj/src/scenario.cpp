#include "qdot/scenario.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qdot/channels.hpp"
#include "qdot/constants.hpp"
#include "qdot/pulses.hpp"
#include "qdot/qec.hpp"

namespace qdot {

namespace {

// ---------------------------------------------------------------------------
// Static validation

const Json& field(const Json& ev, const char* key, const std::string& where) {
  if (!ev.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
  return ev.at(key);
}

double number(const Json& ev, const char* key, const std::string& where) {
  const Json& v = field(ev, key, where);
  if (!v.is_number()) throw SchemaError(where + ": field '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(where + ": field '" + key + "' must be finite");
  return x;
}

std::int64_t integer(const Json& ev, const char* key, const std::string& where) {
  const Json& v = field(ev, key, where);
  if (!v.is_number_integer()) throw SchemaError(where + ": field '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string text(const Json& ev, const char* key, const std::string& where) {
  const Json& v = field(ev, key, where);
  if (!v.is_string()) throw SchemaError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

GridPos position(const Json& v, const Scenario& s, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw SchemaError(where + ": positions are [x, y] integer pairs");
  const GridPos p{v[0].get<int>(), v[1].get<int>()};
  if (p.x < 0 || p.y < 0 || p.x >= s.width || p.y >= s.height)
    throw SchemaError(where + ": position " + to_string(p) + " is outside the " + std::to_string(s.width) + "x" +
                      std::to_string(s.height) + " array");
  return p;
}

GridPos pos_field(const Json& ev, const char* key, const Scenario& s, const std::string& where) {
  return position(field(ev, key, where), s, where + "." + key);
}

const std::set<std::string>& single_qubit_gates() {
  static const std::set<std::string> g{"X", "Y", "Z", "H", "S", "T", "Rot"};
  return g;
}

void validate_event(const Json& ev, const Scenario& s, std::size_t index) {
  const std::string where = "program[" + std::to_string(index) + "]";
  if (!ev.is_object()) throw SchemaError(where + ": events are objects");
  const std::string op = text(ev, "op", where);
  const std::string at = where + " (" + op + ")";
  if (op == "init") {
    pos_field(ev, "at", s, at);
  } else if (op == "gate") {
    const std::string g = text(ev, "gate", at);
    if (single_qubit_gates().count(g)) {
      pos_field(ev, "at", s, at);
      if (g == "Rot") {
        const Json& axis = field(ev, "axis", at);
        if (!axis.is_array() || axis.size() != 3) throw SchemaError(at + ": axis must have three components");
        for (const auto& c : axis)
          if (!c.is_number()) throw SchemaError(at + ": axis components must be numbers");
        number(ev, "angle", at);
      }
    } else if (g == "CNOT") {
      pos_field(ev, "control", s, at);
      pos_field(ev, "target", s, at);
    } else if (g == "SWAP" || g == "SqrtSWAP") {
      pos_field(ev, "a", s, at);
      pos_field(ev, "b", s, at);
    } else {
      throw SchemaError(at + ": unknown gate '" + g + "'");
    }
  } else if (op == "coupling_window") {
    pos_field(ev, "a", s, at);
    pos_field(ev, "b", s, at);
    if (number(ev, "theta", at) < 0) throw SchemaError(at + ": theta must be >= 0");
  } else if (op == "move" || op == "route") {
    pos_field(ev, "from", s, at);
    pos_field(ev, "to", s, at);
  } else if (op == "epr") {
    pos_field(ev, "a", s, at);
    pos_field(ev, "b", s, at);
  } else if (op == "teleport") {
    pos_field(ev, "c", s, at);
    pos_field(ev, "a", s, at);
    pos_field(ev, "b", s, at);
    if (ev.contains("classical_latency") && number(ev, "classical_latency", at) < 0)
      throw SchemaError(at + ": classical_latency must be >= 0");
  } else if (op == "encode") {
    pos_field(ev, "principal", s, at);
    const Json& syn = field(ev, "syndrome", at);
    if (!syn.is_array() || syn.size() != 4) throw SchemaError(at + ": syndrome lists four positions");
    for (const auto& p : syn) position(p, s, at + ".syndrome");
  } else if (op == "qec_cycle") {
    if (ev.contains("errors")) {
      const Json& errs = ev.at("errors");
      if (!errs.is_array()) throw SchemaError(at + ": errors must be an array");
      for (const auto& e : errs) {
        const std::string p = text(e, "pauli", at + ".errors");
        if (p.size() != 1 || !pauli_from_char(p[0])) throw SchemaError(at + ": pauli must be one of I, X, Y, Z");
        const auto k = integer(e, "position", at + ".errors");
        if (k < 0 || k > 4) throw SchemaError(at + ": error position must be a code position 0..4");
      }
    }
  } else if (op == "readout") {
    pos_field(ev, "qubit", s, at);
    pos_field(ev, "readout_dot", s, at);
  } else if (op == "measure") {
    pos_field(ev, "qubit", s, at);
    if (ev.contains("basis")) {
      const std::string b = text(ev, "basis", at);
      if (b != "Z" && b != "X") throw SchemaError(at + ": basis must be Z or X");
    }
  } else if (op == "idle") {
    if (number(ev, "t", at) < 0) throw SchemaError(at + ": t must be >= 0");
  } else if (op == "resources") {
  } else if (op == "channel") {
    const std::string k = text(ev, "kind", at);
    if (!channel_kind_from_string(k)) throw SchemaError(at + ": kind must be swap, tunnel or teleport");
    if (integer(ev, "length_qubits", at) < 1) throw SchemaError(at + ": length_qubits must be >= 1");
    for (const char* key : {"lambda", "t_hop", "threshold"})
      if (ev.contains(key) && !(number(ev, key, at) > 0)) throw SchemaError(at + ": " + key + " must be positive");
  } else if (op == "pulse_budget") {
    if (ev.contains("pulses_per_cycle") && integer(ev, "pulses_per_cycle", at) < 1)
      throw SchemaError(at + ": pulses_per_cycle must be >= 1");
  } else if (op == "teleport_bandwidth") {
    if (!(number(ev, "distance_m", at) > 0)) throw SchemaError(at + ": distance_m must be positive");
    if (ev.contains("rounds") && integer(ev, "rounds", at) < 0) throw SchemaError(at + ": rounds must be >= 0");
  } else {
    throw SchemaError(at + ": unknown op");
  }
}

// ---------------------------------------------------------------------------
// Execution

GridPos P(const Json& v) { return {v[0].get<int>(), v[1].get<int>()}; }

Gate single_gate(const Json& ev) {
  const std::string g = ev.at("gate").get<std::string>();
  if (g == "Rot") {
    const auto& a = ev.at("axis");
    return gates::rot(0, {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()}, ev.at("angle").get<double>());
  }
  return {*gate_kind_from_string(g), {0}};
}

struct ShotResult {
  std::vector<Json> events;
  std::vector<int> bits;
  Json measurements = Json::array();
  Json channels = Json::array();
  Json budgets = Json::object();
  Json resources;
  Json snapshot;
  double final_clock = 0.0;
};

class Runner {
 public:
  Runner(const Scenario& s, std::uint64_t shot_seed)
      : s_(s),
        seed_(shot_seed),
        array_(s.width, s.height, s.material,
               DeviceOptions{s.representation, s.strict, s.readout_error, splitmix64(shot_seed ^ 0x6e6f697365ULL), {}}) {
    for (const auto& d : s.dots) {
      array_.set_role(d.pos, d.role);
      if (d.T2_override) array_.set_T2_override(d.pos, *d.T2_override);
    }
  }

  void run(ShotResult& out) {
    for (std::size_t k = 0; k < s_.program.size(); ++k) {
      index_ = k;
      const Json& ev = s_.program[k];
      Rng rng = Rng::stream(seed_, k);
      Json rec;
      rec["index"] = k;
      rec["op"] = ev.at("op");
      rec["clock_before"] = array_.clock();
      Json checks = Json::object();
      Json result = Json::object();
      execute(ev, rng, checks, result, out);
      rec["clock_after"] = array_.clock();
      rec["fidelity_checks"] = std::move(checks);
      rec["result"] = std::move(result);
      check_invariants();
      out.events.push_back(std::move(rec));
    }
    out.final_clock = array_.clock();
    out.snapshot = array_.snapshot();
  }

  std::size_t index() const { return index_; }

 private:
  void check_invariants() const {
    try {
      array_.check_invariants();
    } catch (const PhysicsError& e) {
      throw InvariantError(e.what());
    }
    if (const auto& st = array_.state()) {
      const double err = st->invariant_error();
      if (!(err <= s_.invariant_tolerance))
        throw InvariantError("state invariant error " + format_double(err) + " exceeds " +
                             format_double(s_.invariant_tolerance));
    }
  }

  DensityMatrix<double> reduced(GridPos p) const {
    const std::array<int, 1> keep{array_.qubit_at(p)};
    return reduced_density(*array_.state(), std::span<const int>(keep));
  }

  void record_bit(ShotResult& out, GridPos p, int bit, const char* kind) {
    out.bits.push_back(bit);
    Json m;
    m["event"] = index_;
    m["kind"] = kind;
    m["position"] = {p.x, p.y};
    m["bit"] = bit;
    out.measurements.push_back(std::move(m));
  }

  void execute(const Json& ev, Rng& rng, Json& checks, Json& result, ShotResult& out) {
    const std::string op = ev.at("op").get<std::string>();
    const MaterialParams& m = array_.material();
    if (op == "init") {
      array_.init_qubit(P(ev.at("at")));
    } else if (op == "gate") {
      const std::string g = ev.at("gate").get<std::string>();
      if (g == "CNOT") {
        array_.cnot(P(ev.at("control")), P(ev.at("target")));
      } else if (g == "SWAP" || g == "SqrtSWAP") {
        array_.coupling_window(P(ev.at("a")), P(ev.at("b")), g == "SWAP" ? constants::pi : constants::pi / 2);
      } else {
        array_.rabi_pulse(P(ev.at("at")), single_gate(ev));
      }
    } else if (op == "coupling_window") {
      array_.coupling_window(P(ev.at("a")), P(ev.at("b")), ev.at("theta").get<double>());
    } else if (op == "move") {
      array_.move_electron(P(ev.at("from")), P(ev.at("to")));
    } else if (op == "route") {
      const auto path = plan_tunnel_route(array_, P(ev.at("from")), P(ev.at("to")));
      Json jp = Json::array();
      for (GridPos p : path) jp.push_back({p.x, p.y});
      result["path"] = std::move(jp);
      if (path.size() >= 2) {
        const auto report = tunnel_channel_metrics(make_channel_spec(ChannelKind::tunnel, path, m), &array_);
        Json r = to_json(report);
        r["event"] = index_;
        out.channels.push_back(std::move(r));
      }
      execute_route(array_, path);
    } else if (op == "epr") {
      const GridPos a = P(ev.at("a")), b = P(ev.at("b"));
      make_epr(array_, a, b);
      checks["bell_fidelity"] = bell_fidelity(array_, a, b);
    } else if (op == "teleport") {
      teleport_event(ev, rng, checks, result);
    } else if (op == "encode") {
      LogicalQubit lq;
      lq.principal = array_.qubit_at(P(ev.at("principal")));
      for (std::size_t j = 0; j < 4; ++j) lq.syndrome[j] = array_.qubit_at(P(ev.at("syndrome")[j]));
      const double t = cycle_pulse_count().encode * m.t_pulse;
      array_.transform_state(
          [&](State st) {
            encode5(st, lq);
            return st;
          },
          t, "encode");
      logical_ = lq;
      result["pulses"] = cycle_pulse_count().encode;
    } else if (op == "qec_cycle") {
      if (!logical_) throw QecError("qec_cycle before encode");
      std::vector<InjectedError> errors;
      if (ev.contains("errors"))
        for (const auto& e : ev.at("errors"))
          errors.push_back({*pauli_from_char(e.at("pauli").get<std::string>()[0]), e.at("position").get<int>()});
      const State before = *array_.state();
      QecCycleReport rep;
      const double t = cycle_pulse_count().total() * m.t_pulse;
      array_.transform_state(
          [&](State st) {
            rep = qec_cycle(st, *logical_, errors, rng);
            return st;
          },
          t, "qec_cycle");
      result = to_json(rep);
      checks["fidelity_to_pre_cycle"] = state_fidelity(*array_.state(), before);
    } else if (op == "readout") {
      const GridPos q = P(ev.at("qubit"));
      const auto r = array_.readout(q, P(ev.at("readout_dot")), rng);
      result["bit"] = r.bit;
      result["charge_detected"] = r.charge_detected;
      record_bit(out, q, r.bit, "readout");
    } else if (op == "measure") {
      const GridPos q = P(ev.at("qubit"));
      const Basis basis = ev.value("basis", std::string("Z")) == "X" ? Basis::X : Basis::Z;
      const int bit = array_.measure(q, basis, rng);
      result["bit"] = bit;
      record_bit(out, q, bit, "measure");
    } else if (op == "idle") {
      array_.idle(ev.at("t").get<double>());
      if (s_.strict) {
        Json res = Json::array();
        for (const auto& r : array_.residual_coupling_error(ev.at("t").get<double>()))
          res.push_back({{"a", {r.a.x, r.a.y}}, {"b", {r.b.x, r.b.y}}, {"theta", r.theta}});
        result["residual_phases"] = std::move(res);
      }
    } else if (op == "resources") {
      out.resources = resources_report(m);
      result = out.resources;
    } else if (op == "channel") {
      result = channel_event(ev, m);
      Json r = result;
      r["event"] = index_;
      out.channels.push_back(std::move(r));
    } else if (op == "pulse_budget") {
      const int n = ev.value("pulses_per_cycle", 500);
      result = to_json(pulse_budget(m, n));
      const auto c = cycle_pulse_count();
      result["compiled_cycle_pulses"] = c.total();
      result["reference_cycle_pulses"] = 500;
      out.budgets["pulse_budget"] = result;
    } else if (op == "teleport_bandwidth") {
      TeleportBandwidthAssumptions a;
      a.purification_rounds = ev.value("rounds", 0);
      result = to_json(teleport_bandwidth(ev.at("distance_m").get<double>(), m, a));
      result["reference_bps"] = 1.65e8;
      result["ratio_to_reference"] = result["true_bandwidth_bps"].get<double>() / 1.65e8;
      Json r = result;
      r["event"] = index_;
      out.channels.push_back(std::move(r));
    }
  }

  static Json channel_event(const Json& ev, const MaterialParams& m) {
    const ChannelKind kind = *channel_kind_from_string(ev.at("kind").get<std::string>());
    const int d = ev.at("length_qubits").get<int>();
    if (kind == ChannelKind::teleport) {
      TeleportBandwidthAssumptions a;
      if (ev.contains("threshold")) a.fidelity_threshold = ev.at("threshold").get<double>();
      return to_json(teleport_bandwidth(d * m.dot_pitch, m, a));
    }
    ChannelSpec spec = make_channel_spec(kind, straight_path(d), m);
    if (ev.contains("lambda")) spec.lambda = ev.at("lambda").get<double>();
    if (ev.contains("t_hop")) spec.t_hop = ev.at("t_hop").get<double>();
    if (ev.contains("threshold")) spec.fidelity_threshold = ev.at("threshold").get<double>();
    return to_json(kind == ChannelKind::swap ? swap_channel_metrics(spec) : tunnel_channel_metrics(spec));
  }

  void teleport_event(const Json& ev, Rng& rng, Json& checks, Json& result) {
    const GridPos c = P(ev.at("c")), a = P(ev.at("a")), b = P(ev.at("b"));
    TeleportOptions opt;
    opt.classical_latency = ev.value("classical_latency", 0.0);
    const DensityMatrix<double> payload = reduced(c);
    Json branches = Json::array();
    for (int mc : {0, 1})
      for (int ma : {0, 1}) {
        DotArray copy = array_;
        Rng unused(0);
        TeleportOptions forced = opt;
        forced.force_phase = mc;
        forced.force_amplitude = ma;
        const auto r = teleport(copy, c, a, b, unused, forced);
        const std::array<int, 1> keep{copy.qubit_at(b)};
        const auto rho_b = reduced_density(*copy.state(), std::span<const int>(keep));
        branches.push_back({{"phase_bit", mc},
                            {"amplitude_bit", ma},
                            {"probability", r.branch_probability},
                            {"fidelity", matrix_fidelity<double>(payload, rho_b)}});
      }
    const auto r = teleport(array_, c, a, b, rng, opt);
    result["phase_bit"] = r.phase_bit;
    result["amplitude_bit"] = r.amplitude_bit;
    checks["payload_fidelity"] = matrix_fidelity<double>(payload, reduced(b));
    checks["branches"] = std::move(branches);
  }

  const Scenario& s_;
  std::uint64_t seed_;
  DotArray array_;
  std::optional<LogicalQubit> logical_;
  std::size_t index_ = 0;
};

}  // namespace

Json resources_report(const MaterialParams& m) {
  Json j;
  j["material"] = m.name;
  j["g_factor"] = m.g_factor;
  j["drive"] = to_json(drive_report(m));
  j["exchange"] = to_json(exchange_estimate(m));
  j["swap_duration_s"] = swap_duration(m.J_on);
  j["tunnel_hop_s"] = swap_duration(m.J_on) / 10.0;
  if (std::isfinite(m.noise.T2)) {
    const auto b = min_rabi_field(m.g_factor, m.noise.T2);
    j["min_rabi_field"] = {{"B_min_T", b.B_min}, {"ratio_vs_gaas", b.ratio_vs_gaas}};
    j["pulse_budget"] = to_json(pulse_budget(m));
  }
  const double E = zeeman_splitting(15.0, 1.0);
  Json z;
  z["g_low"] = 0.44;
  z["g_high"] = 15.0;
  z["field_ratio"] = field_for_splitting(0.44, E) / field_for_splitting(15.0, E);
  z["rounded_reference"] = 30;
  j["zeeman_field_ratio"] = std::move(z);
  j["drive_power_ratio_vs_gaas"] = drive_power_ratio(m.g_factor, 0.44);
  return j;
}

Scenario parse_scenario(const Json& j, const ScenarioOverrides& o) {
  if (!j.is_object()) throw SchemaError("scenario must be a JSON object");
  Scenario s;
  const int version = static_cast<int>(integer(j, "schema_version", "scenario"));
  if (version != kScenarioSchemaVersion)
    throw SchemaError("unsupported schema_version " + std::to_string(version) + " (expected " +
                      std::to_string(kScenarioSchemaVersion) + ")");
  s.schema_version = version;
  const Json& seed = field(j, "seed", "scenario");
  if (!seed.is_number_unsigned()) throw SchemaError("scenario: seed must be a non-negative integer");
  s.seed = o.seed.value_or(seed.get<std::uint64_t>());

  static const std::set<std::string> known{"schema_version", "seed", "material", "array",  "representation",
                                           "strict",         "readout_error", "shots", "output", "program",
                                           "description",    "invariant_tolerance"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw SchemaError("scenario: unknown field '" + it.key() + "'");

  try {
    if (o.preset) {
      s.material = material_preset(*o.preset);
    } else {
      s.material = material_from_json(j.contains("material") ? j.at("material") : Json("inas"));
    }
    s.material.validate();
  } catch (const std::exception& e) {
    throw SchemaError(std::string("scenario.material: ") + e.what());
  }

  const Json& arr = field(j, "array", "scenario");
  s.width = static_cast<int>(integer(arr, "width", "array"));
  s.height = static_cast<int>(integer(arr, "height", "array"));
  if (s.width < 1 || s.height < 1 || s.width > 64 || s.height > 64)
    throw SchemaError("array: width and height must be in 1..64");
  if (arr.contains("dots")) {
    if (!arr.at("dots").is_array()) throw SchemaError("array.dots must be an array");
    for (const auto& d : arr.at("dots")) {
      DotSetup ds;
      ds.pos = pos_field(d, "at", s, "array.dots");
      const auto role = dot_role_from_string(text(d, "role", "array.dots"));
      if (!role || *role == DotRole::qubit)
        throw SchemaError("array.dots: role must be empty, readout or intermediary (qubits come from init)");
      ds.role = *role;
      if (d.contains("T2")) {
        ds.T2_override = number(d, "T2", "array.dots");
        NoiseParams n = s.material.noise;
        n.T2 = *ds.T2_override;
        try {
          n.validate();
        } catch (const std::exception& e) {
          throw SchemaError(std::string("array.dots T2: ") + e.what());
        }
      }
      s.dots.push_back(ds);
    }
  }

  const std::string rep = j.value("representation", std::string("vector"));
  if (rep == "vector") s.representation = Representation::vector;
  else if (rep == "matrix") s.representation = Representation::matrix;
  else throw SchemaError("representation must be 'vector' or 'matrix'");

  if (j.contains("strict") && !j.at("strict").is_boolean()) throw SchemaError("strict must be a boolean");
  s.strict = o.strict || j.value("strict", false);
  if (j.contains("readout_error")) {
    s.readout_error = number(j, "readout_error", "scenario");
    if (s.readout_error < 0 || s.readout_error > 1) throw SchemaError("readout_error must be in [0, 1]");
  }
  if (j.contains("invariant_tolerance")) {
    s.invariant_tolerance = number(j, "invariant_tolerance", "scenario");
    if (!(s.invariant_tolerance >= 0)) throw SchemaError("invariant_tolerance must be >= 0");
  }
  if (j.contains("shots")) s.shots = static_cast<int>(integer(j, "shots", "scenario"));
  if (o.shots) s.shots = *o.shots;
  if (s.shots < 1) throw SchemaError("shots must be >= 1");
  if (j.contains("output")) s.output = text(j, "output", "scenario");
  if (o.output) s.output = *o.output;

  const Json& program = field(j, "program", "scenario");
  if (!program.is_array()) throw SchemaError("program must be an array");
  for (std::size_t k = 0; k < program.size(); ++k) validate_event(program[k], s, k);
  s.program.assign(program.begin(), program.end());
  return s;
}

Scenario load_scenario(const std::string& path, const ScenarioOverrides& overrides, std::string* raw_text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string raw = buf.str();
  Json j;
  try {
    j = Json::parse(raw);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (raw_text) *raw_text = raw;
  return parse_scenario(j, overrides);
}

std::string sha256_digest(const std::string& text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

RunOutcome run_scenario(const Scenario& s, const std::string& digest) {
  RunOutcome out;
  Json report;
  report["schema_version"] = s.schema_version;
  report["scenario_digest"] = digest;
  report["seed"] = s.seed;
  report["shots"] = s.shots;
  report["strict"] = s.strict;
  report["representation"] = s.representation == Representation::vector ? "vector" : "matrix";
  report["material"] = material_to_json(s.material);

  std::map<std::string, int> histogram;
  std::int64_t correlation_sum = 0;
  bool two_bit_shots = true;
  for (int shot = 0; shot < s.shots; ++shot) {
    ShotResult res;
    Runner runner(s, s.seed + static_cast<std::uint64_t>(shot));
    try {
      runner.run(res);
    } catch (const InvariantError& e) {
      out.exit_code = 4;
      out.error = Json{{"error", "invariant"}, {"message", e.what()}, {"shot", shot}, {"event", runner.index()}};
    } catch (const std::exception& e) {
      out.exit_code = 3;
      out.error = Json{{"error", "physics"}, {"message", e.what()}, {"shot", shot}, {"event", runner.index()}};
    }
    if (shot == 0) {
      out.event_log = res.events;
      Json events = Json::array();
      for (const auto& e : res.events) events.push_back(e);
      report["events"] = std::move(events);
      report["measurements"] = res.measurements;
      report["channels"] = res.channels;
      report["budgets"] = res.budgets;
      if (!res.resources.is_null()) report["resources"] = res.resources;
      report["final_clock"] = res.final_clock;
      if (!res.snapshot.is_null()) report["final_array"] = res.snapshot;
    }
    if (out.error) {
      report["error"] = *out.error;
      out.report = std::move(report);
      return out;
    }
    std::string key;
    for (int b : res.bits) key.push_back(b ? '1' : '0');
    ++histogram[key];
    if (res.bits.size() == 2) correlation_sum += (res.bits[0] == res.bits[1]) ? 1 : -1;
    else two_bit_shots = false;
  }
  if (s.shots > 1) {
    Json summary;
    Json h = Json::object();
    for (const auto& [k, v] : histogram) h[k.empty() ? "-" : k] = v;
    summary["histogram"] = std::move(h);
    if (two_bit_shots) {
      const double mean = static_cast<double>(correlation_sum) / s.shots;
      summary["zz_correlation"] = mean;
      summary["zz_correlation_stderr"] = std::sqrt(std::max(0.0, 1.0 - mean * mean) / s.shots);
    }
    report["shot_summary"] = std::move(summary);
  }
  out.report = std::move(report);
  return out;
}

}  // namespace qdot
