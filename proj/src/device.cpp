#include "qdot/device.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qdot/constants.hpp"
#include "qdot/pulses.hpp"

namespace qdot {

std::string to_string(GridPos p) { return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")"; }

std::string to_string(DotRole role) {
  switch (role) {
    case DotRole::qubit: return "qubit";
    case DotRole::empty: return "empty";
    case DotRole::readout: return "readout";
    case DotRole::intermediary: return "intermediary";
  }
  return "?";
}

std::optional<DotRole> dot_role_from_string(std::string_view name) {
  for (auto r : {DotRole::qubit, DotRole::empty, DotRole::readout, DotRole::intermediary})
    if (to_string(r) == name) return r;
  return std::nullopt;
}

double rotation_angle(const Operator<double>& u) {
  const double c = std::min(1.0, std::abs(u.trace()) / 2.0);
  return 2.0 * std::acos(c);
}

std::vector<Gate> compile_cnot(int control, int target) {
  using constants::pi;
  return {gates::h(target),
          gates::exchange(control, target, pi / 2),
          gates::rz(control, pi),
          gates::exchange(control, target, pi / 2),
          gates::rz(control, pi / 2),
          gates::rz(target, -pi / 2),
          gates::h(target)};
}

DotArray::DotArray(int width, int height, MaterialParams material, DeviceOptions options)
    : width_(width),
      height_(height),
      material_(std::move(material)),
      options_(options),
      noise_rng_(options.noise_seed) {
  if (width < 1 || height < 1) throw PhysicsError("array dimensions must be positive");
  material_.validate();
  if (options_.readout_error < 0 || options_.readout_error > 1)
    throw std::invalid_argument("readout_error must be in [0, 1]");
  dots_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
}

bool DotArray::in_bounds(GridPos p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }

bool DotArray::adjacent(GridPos a, GridPos b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1; }

void DotArray::require_in_bounds(GridPos p) const {
  if (!in_bounds(p)) throw PhysicsError("position " + to_string(p) + " is outside the array");
}

const Dot& DotArray::dot(GridPos p) const {
  require_in_bounds(p);
  return dots_[static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(p.x)];
}

Dot& DotArray::dot_mut(GridPos p) { return const_cast<Dot&>(std::as_const(*this).dot(p)); }

void DotArray::set_role(GridPos p, DotRole role) {
  Dot& d = dot_mut(p);
  if (d.occupied && role != DotRole::qubit) throw PhysicsError("occupied dot " + to_string(p) + " must keep role qubit");
  d.role = role;
}

void DotArray::set_T2_override(GridPos p, double T2) {
  NoiseParams n = material_.noise;
  n.T2 = T2;
  n.validate();
  dot_mut(p).T2_override = T2;
}

NoiseParams DotArray::noise_for(GridPos p) const {
  NoiseParams n = material_.noise;
  if (const auto& o = dot(p).T2_override) n.T2 = *o;
  return n;
}

int DotArray::occupied_count() const {
  return static_cast<int>(std::count_if(dots_.begin(), dots_.end(), [](const Dot& d) { return d.occupied; }));
}

void DotArray::require_occupied(GridPos p) const {
  if (!dot(p).occupied) throw PhysicsError("dot " + to_string(p) + " holds no electron");
}

int DotArray::qubit_at(GridPos p) const {
  require_occupied(p);
  return *dot(p).qubit_id;
}

std::optional<GridPos> DotArray::position_of(int qubit) const {
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) {
      const Dot& d = dot({x, y});
      if (d.occupied && d.qubit_id == qubit) return GridPos{x, y};
    }
  return std::nullopt;
}

void DotArray::apply_gate_now(const Gate& g) { state_->apply(g); }

void DotArray::advance(const std::string& name, PulseEvent pulse,
                       std::optional<std::pair<GridPos, GridPos>> active) {
  if (pulse.duration < 0) throw PhysicsError("negative duration for " + name);
  const double before = clock_;
  if (pulse.gate) apply_gate_now(*pulse.gate);
  const double t = pulse.duration;
  if (state_ && t > 0) {
    if (options_.strict) {
      for (const auto& r : residual_coupling_error(t)) {
        if (active && ((r.a == active->first && r.b == active->second) ||
                       (r.a == active->second && r.b == active->first)))
          continue;
        if (r.theta != 0) state_->apply(gates::exchange(qubit_at(r.a), qubit_at(r.b), r.theta));
      }
    }
    if (material_.noise.enabled) {
      for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) {
          const Dot& d = dot({x, y});
          if (!d.occupied) continue;
          const NoiseParams n = noise_for({x, y});
          if (state_->is_vector()) {
            trajectory_idle_step(*state_, *d.qubit_id, t, n, noise_rng_);
          } else {
            *state_ = idle_channel(std::move(*state_), *d.qubit_id, t, n);
          }
        }
    }
  }
  clock_ += t;
  events_.push_back({name, before, clock_, std::move(pulse)});
}

void DotArray::init_qubit(GridPos p) {
  Dot& d = dot_mut(p);
  if (d.occupied) throw PhysicsError("Coulomb blockade: dot " + to_string(p) + " is already occupied");
  if (d.role == DotRole::readout) throw PhysicsError("cannot initialise a qubit in readout dot " + to_string(p));
  const State fresh = State::zero(1, options_.representation, options_.limits);
  state_ = state_ ? state_->tensor(fresh) : fresh;
  d.occupied = true;
  d.qubit_id = state_->n_qubits() - 1;
  d.role = DotRole::qubit;
  advance("init", {PulseKind::init, std::nullopt, material_.t_pulse, 0.0});
}

void DotArray::move_electron(GridPos from, GridPos to) {
  require_occupied(from);
  require_in_bounds(to);
  if (!adjacent(from, to)) throw PhysicsError("move " + to_string(from) + " -> " + to_string(to) + ": not adjacent");
  Dot& dst = dot_mut(to);
  if (dst.occupied) throw PhysicsError("Coulomb blockade: destination " + to_string(to) + " is occupied");
  if (dst.role == DotRole::readout) throw PhysicsError("cannot move a qubit into readout dot " + to_string(to));
  Dot& src = dot_mut(from);
  dst.occupied = true;
  dst.qubit_id = src.qubit_id;
  dst.role = DotRole::qubit;
  src.occupied = false;
  src.qubit_id.reset();
  src.role = DotRole::empty;
  advance("move", {PulseKind::tunnel_hop, std::nullopt, swap_duration(material_.J_on) / 10.0, 0.0});
}

void DotArray::coupling_window(GridPos a, GridPos b, double theta) {
  require_occupied(a);
  require_occupied(b);
  if (!adjacent(a, b)) throw PhysicsError("coupling " + to_string(a) + " - " + to_string(b) + ": not adjacent");
  if (theta < 0) throw PhysicsError("coupling window needs theta >= 0");
  if (theta == 0) return;
  const double t = theta * constants::hbar / material_.J_on;
  advance("coupling_window", {PulseKind::exchange, gates::exchange(qubit_at(a), qubit_at(b), theta), t, 0.0},
          std::pair{a, b});
}

void DotArray::rabi_pulse(GridPos p, const Gate& gate) {
  if (gate_arity(gate.kind) != 1) throw PhysicsError("Rabi pulses realise single-qubit gates only");
  Gate g = gate;
  g.targets = {qubit_at(p)};
  const double t = rabi_rotation_time(material_, rotation_angle(gate_matrix<double>(g)));
  advance("rabi", {PulseKind::rabi, g, t, rabi_drive_power(material_) * t});
}

void DotArray::cnot(GridPos control, GridPos target) {
  const int c = qubit_at(control);
  const int t = qubit_at(target);
  if (!adjacent(control, target)) throw PhysicsError("cnot " + to_string(control) + " -> " + to_string(target) + ": not adjacent");
  for (const Gate& g : compile_cnot(c, t)) {
    if (g.kind == GateKind::ExchangeEvolve) {
      coupling_window(control, target, g.angle);
    } else {
      rabi_pulse(g.targets[0] == c ? control : target, g);
    }
  }
}

ReadoutResult DotArray::readout(GridPos qubit, GridPos readout_dot, Rng& rng) {
  const int q = qubit_at(qubit);
  const Dot& r = dot(readout_dot);
  if (r.role != DotRole::readout) throw PhysicsError("dot " + to_string(readout_dot) + " is not a readout dot");
  if (r.occupied) throw PhysicsError("readout dot " + to_string(readout_dot) + " is occupied");
  auto m = qdot::measure(*state_, q, Basis::Z, rng);
  state_ = std::move(m.state);
  int bit = m.outcome;
  if (options_.readout_error > 0 && rng.bernoulli(options_.readout_error)) bit ^= 1;
  advance("readout", {PulseKind::readout, std::nullopt, material_.readout_transfer + material_.readout_measure, 0.0});
  return {bit, m.outcome == 0};
}

int DotArray::measure(GridPos qubit, Basis basis, Rng& rng) {
  const int q = qubit_at(qubit);
  auto m = qdot::measure(*state_, q, basis, rng);
  state_ = std::move(m.state);
  advance("measure", {PulseKind::readout, std::nullopt, material_.readout_transfer + material_.readout_measure, 0.0});
  return m.outcome;
}

double DotArray::postselect(GridPos qubit, Basis basis, int outcome) {
  const int q = qubit_at(qubit);
  auto pr = project(*state_, q, basis, outcome);
  if (pr.probability < 1e-12) throw PhysicsError("postselected outcome has zero probability");
  state_ = std::move(pr.state);
  advance("measure", {PulseKind::readout, std::nullopt, material_.readout_transfer + material_.readout_measure, 0.0});
  return pr.probability;
}

void DotArray::idle(double t) {
  if (t < 0) throw PhysicsError("idle time must be >= 0");
  advance("idle", {PulseKind::idle, std::nullopt, t, 0.0});
}

std::vector<ResidualPhase> DotArray::residual_coupling_error(double idle_t) const {
  if (idle_t < 0) throw PhysicsError("idle time must be >= 0");
  std::vector<ResidualPhase> out;
  const double theta = material_.J_off * idle_t / constants::hbar;
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) {
      if (!dot({x, y}).occupied) continue;
      for (GridPos n : {GridPos{x + 1, y}, GridPos{x, y + 1}})
        if (in_bounds(n) && dot(n).occupied) out.push_back({{x, y}, n, theta});
    }
  return out;
}

void DotArray::transform_state(const std::function<State(State)>& fn, double duration, const std::string& name,
                               PulseKind kind) {
  if (!state_) throw PhysicsError(name + ": no qubits in the array");
  state_ = fn(std::move(*state_));
  advance(name, {kind, std::nullopt, duration, 0.0});
}

PulseSchedule DotArray::schedule() const {
  PulseSchedule s;
  for (const auto& e : events_) s.events.push_back(e.pulse);
  return s;
}

Json DotArray::snapshot() const {
  Json j;
  j["width"] = width_;
  j["height"] = height_;
  Json dots = Json::array();
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) {
      const Dot& d = dot({x, y});
      Json e;
      e["x"] = x;
      e["y"] = y;
      e["occupied"] = d.occupied;
      e["role"] = to_string(d.role);
      e["qubit_id"] = d.qubit_id ? Json(*d.qubit_id) : Json(nullptr);
      dots.push_back(std::move(e));
    }
  j["dots"] = std::move(dots);
  j["clock"] = clock_;
  return j;
}

void DotArray::check_invariants() const {
  std::set<int> ids;
  for (const Dot& d : dots_) {
    if (d.occupied != d.qubit_id.has_value()) throw PhysicsError("dot occupancy and qubit id disagree");
    if (d.occupied && !ids.insert(*d.qubit_id).second) throw PhysicsError("duplicate qubit id");
  }
  const int n = state_ ? state_->n_qubits() : 0;
  if (static_cast<int>(ids.size()) != n) throw PhysicsError("register size differs from electron count");
  if (!ids.empty() && (*ids.begin() != 0 || *ids.rbegin() != n - 1)) throw PhysicsError("qubit ids are not 0..n-1");
  double prev = 0;
  for (const auto& e : events_) {
    if (e.clock_before < prev || e.clock_after < e.clock_before) throw PhysicsError("clock ran backwards");
    prev = e.clock_after;
  }
}

}  // namespace qdot
