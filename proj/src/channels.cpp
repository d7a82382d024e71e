#include "qdot/channels.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include "qdot/pulses.hpp"

namespace qdot {

const char* const kMaxDistanceNote =
    "max distance is ln(1 - threshold) / (-lambda) hops; at lambda = 1e-6 this is about 100 qubits for "
    "threshold 1e-4 and about 10 qubits (1 um at 100 nm pitch) for threshold 1e-5; both readings are listed.";

std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::swap: return "swap";
    case ChannelKind::tunnel: return "tunnel";
    case ChannelKind::teleport: return "teleport";
  }
  return "?";
}

std::optional<ChannelKind> channel_kind_from_string(std::string_view name) {
  for (auto k : {ChannelKind::swap, ChannelKind::tunnel, ChannelKind::teleport})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

void ChannelSpec::validate() const {
  if (path.size() < 2) throw std::invalid_argument("channel path needs at least two positions");
  std::set<GridPos> seen;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!seen.insert(path[i]).second) throw std::invalid_argument("channel path revisits " + to_string(path[i]));
    if (i > 0 && !DotArray::adjacent(path[i - 1], path[i]))
      throw std::invalid_argument("channel path step " + to_string(path[i - 1]) + " -> " + to_string(path[i]) +
                                  " is not a nearest-neighbour hop");
  }
  if (!(lambda > 0 && lambda < 1)) throw std::invalid_argument("channel lambda must be in (0, 1)");
  if (!(t_hop > 0)) throw std::invalid_argument("channel t_hop must be positive");
  if (!(fidelity_threshold > 0 && fidelity_threshold < 1))
    throw std::invalid_argument("fidelity threshold must be in (0, 1)");
}

std::vector<GridPos> straight_path(int hops) {
  if (hops < 0) throw std::invalid_argument("straight_path: hops must be >= 0");
  std::vector<GridPos> p;
  for (int i = 0; i <= hops; ++i) p.push_back({i, 0});
  return p;
}

ChannelSpec make_channel_spec(ChannelKind kind, std::vector<GridPos> path, const MaterialParams& m) {
  ChannelSpec s;
  s.kind = kind;
  s.path = std::move(path);
  const double t_swap = swap_duration(m.J_on);
  s.t_hop = kind == ChannelKind::swap ? t_swap : t_swap / 10.0;
  s.lambda = channel_lambda(s.t_hop, m.noise.T2);
  return s;
}

double channel_lambda(double t_op, double T2) {
  if (t_op < 0) throw std::invalid_argument("channel_lambda: t_op must be >= 0");
  if (!(T2 > 0)) throw std::invalid_argument("channel_lambda: T2 must be positive");
  return t_op / T2;
}

double channel_fidelity(double lambda, double d) {
  if (d < 0) throw std::invalid_argument("channel_fidelity: d must be >= 0");
  return std::exp(-lambda * d);
}

double max_distance(double lambda, double threshold) {
  if (!(lambda > 0)) throw std::invalid_argument("max_distance: lambda must be positive");
  if (!(threshold > 0 && threshold < 1)) throw std::invalid_argument("max_distance: threshold must be in (0, 1)");
  return std::log1p(-threshold) / -lambda;
}

namespace {

ChannelReport metrics(const ChannelSpec& spec) {
  spec.validate();
  ChannelReport r{};
  r.kind = spec.kind;
  r.hops = spec.hops();
  r.lambda = spec.lambda;
  r.t_hop = spec.t_hop;
  r.fidelity = channel_fidelity(spec.lambda, r.hops);
  r.latency = r.hops * spec.t_hop;
  r.physical_bandwidth = 1.0 / r.latency;
  r.true_bandwidth = r.physical_bandwidth * r.fidelity;
  r.max_distance_qubits = max_distance(spec.lambda, spec.fidelity_threshold);
  for (double th : {1e-4, 1e-5}) r.max_distance_table.push_back({th, max_distance(spec.lambda, th)});
  return r;
}

}  // namespace

ChannelReport swap_channel_metrics(const ChannelSpec& spec, const DotArray* array) {
  if (spec.kind != ChannelKind::swap) throw std::invalid_argument("swap_channel_metrics needs a swap spec");
  if (array)
    for (GridPos p : spec.path)
      if (!array->in_bounds(p) || !array->dot(p).occupied)
        throw RoutingError("swap chain passes through empty dot " + to_string(p));
  return metrics(spec);
}

ChannelReport tunnel_channel_metrics(const ChannelSpec& spec, const DotArray* array) {
  if (spec.kind != ChannelKind::tunnel) throw std::invalid_argument("tunnel_channel_metrics needs a tunnel spec");
  if (array) {
    if (!array->in_bounds(spec.path.front()) || !array->dot(spec.path.front()).occupied)
      throw RoutingError("tunnel route must start at an occupied dot");
    for (std::size_t i = 1; i < spec.path.size(); ++i)
      if (!array->in_bounds(spec.path[i]) || array->dot(spec.path[i]).occupied)
        throw RoutingError("tunnel route passes through occupied dot " + to_string(spec.path[i]));
  }
  return metrics(spec);
}

Json to_json(const Conflict& c) {
  Json j;
  j["position"] = {c.pos.x, c.pos.y};
  j["routes"] = {c.route_a, c.route_b};
  j["window_s"] = {c.t_start, c.t_end};
  return j;
}

Json to_json(const ChannelReport& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["hops"] = r.hops;
  j["lambda"] = r.lambda;
  j["t_hop_s"] = r.t_hop;
  j["fidelity"] = r.fidelity;
  j["latency_s"] = r.latency;
  j["physical_bandwidth_bps"] = r.physical_bandwidth;
  j["true_bandwidth_bps"] = r.true_bandwidth;
  j["max_distance_qubits"] = r.max_distance_qubits;
  Json table = Json::array();
  for (const auto& m : r.max_distance_table) table.push_back({{"threshold", m.threshold}, {"qubits", m.qubits}});
  j["max_distance_table"] = std::move(table);
  j["max_distance_note"] = kMaxDistanceNote;
  Json conflicts = Json::array();
  for (const auto& c : r.conflicts) conflicts.push_back(to_json(c));
  j["conflicts"] = std::move(conflicts);
  return j;
}

std::vector<GridPos> plan_tunnel_route(const DotArray& array, GridPos src, GridPos dst,
                                       const std::set<GridPos>& blocked) {
  if (!array.in_bounds(src) || !array.in_bounds(dst)) throw RoutingError("route endpoint outside the array");
  if (!array.dot(src).occupied) throw RoutingError("route source " + to_string(src) + " holds no electron");
  if (array.dot(dst).occupied) throw RoutingError("route destination " + to_string(dst) + " is occupied");
  auto enterable = [&](GridPos p) {
    if (!array.in_bounds(p) || blocked.count(p)) return false;
    const Dot& d = array.dot(p);
    return !d.occupied && d.role != DotRole::readout;
  };
  if (!enterable(dst)) throw RoutingError("route destination " + to_string(dst) + " cannot be entered");
  static constexpr std::array<std::array<int, 2>, 4> kSteps{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
  std::map<GridPos, GridPos> parent;
  std::deque<GridPos> queue{src};
  parent[src] = src;
  while (!queue.empty()) {
    const GridPos p = queue.front();
    queue.pop_front();
    if (p == dst) break;
    for (const auto& s : kSteps) {
      const GridPos n{p.x + s[0], p.y + s[1]};
      if (parent.count(n) || !enterable(n)) continue;
      parent[n] = p;
      queue.push_back(n);
    }
  }
  if (!parent.count(dst))
    throw RoutingError("no empty path from " + to_string(src) + " to " + to_string(dst));
  std::vector<GridPos> path{dst};
  while (path.back() != src) path.push_back(parent.at(path.back()));
  return {path.rbegin(), path.rend()};
}

void execute_route(DotArray& array, std::span<const GridPos> path) {
  for (std::size_t i = 1; i < path.size(); ++i) array.move_electron(path[i - 1], path[i]);
}

std::vector<Conflict> detect_conflicts(std::span<const TimedRoute> routes) {
  std::vector<Conflict> out;
  for (std::size_t i = 0; i < routes.size(); ++i)
    for (std::size_t j = i + 1; j < routes.size(); ++j) {
      const double lo = std::max(routes[i].t_start, routes[j].t_start);
      const double hi = std::min(routes[i].t_end, routes[j].t_end);
      if (!(lo < hi)) continue;
      const std::set<GridPos> a(routes[i].path.begin(), routes[i].path.end());
      const std::set<GridPos> b(routes[j].path.begin(), routes[j].path.end());
      for (GridPos p : a)
        if (b.count(p)) out.push_back({p, i, j, lo, hi});
    }
  return out;
}

double bell_fidelity(const DotArray& array, GridPos a, GridPos b) {
  const auto& st = array.state();
  if (!st) throw PhysicsError("no qubits in the array");
  const std::array<int, 2> keep{array.qubit_at(a), array.qubit_at(b)};
  const DensityMatrix<double> rho = reduced_density(*st, std::span<const int>(keep));
  const double f = 0.5 * (rho(0, 0) + rho(0, 3) + rho(3, 0) + rho(3, 3)).real();
  return std::clamp(f, 0.0, 1.0);
}

void make_epr(DotArray& array, GridPos a, GridPos b) {
  if (array.options().strict) {
    const std::array<int, 2> keep{array.qubit_at(a), array.qubit_at(b)};
    const auto rho = reduced_density(*array.state(), std::span<const int>(keep));
    if (rho(0, 0).real() < 1.0 - 1e-9) throw PhysicsError("make_epr needs both qubits in |0>");
  }
  array.rabi_pulse(a, gates::h(0));
  array.cnot(a, b);
}

TeleportResult teleport(DotArray& array, GridPos c, GridPos a, GridPos b, Rng& rng, const TeleportOptions& options) {
  if (bell_fidelity(array, a, b) <= 0.5) throw PhysicsError("teleport: (a, b) do not share an EPR pair");
  if (array.options().strict) {
    const std::array<int, 1> keep{array.qubit_at(c)};
    const auto rho = reduced_density(*array.state(), std::span<const int>(keep));
    const double purity = (rho * rho).trace().real();
    if (purity < 1.0 - 1e-6) throw PhysicsError("teleport: payload is entangled with other qubits");
  }
  array.cnot(c, a);
  TeleportResult r{0, 0, 1.0};
  if (options.force_phase) {
    r.phase_bit = *options.force_phase;
    r.branch_probability *= array.postselect(c, Basis::X, r.phase_bit);
  } else {
    r.phase_bit = array.measure(c, Basis::X, rng);
  }
  if (options.force_amplitude) {
    r.amplitude_bit = *options.force_amplitude;
    r.branch_probability *= array.postselect(a, Basis::Z, r.amplitude_bit);
  } else {
    r.amplitude_bit = array.measure(a, Basis::Z, rng);
  }
  if (options.classical_latency > 0) array.idle(options.classical_latency);
  if (r.amplitude_bit) array.rabi_pulse(b, gates::x(0));
  if (r.phase_bit) array.rabi_pulse(b, gates::z(0));
  return r;
}

double bbpssw_success_probability(double F) {
  const double e = 1.0 - F;
  return F * F + 2.0 * F * e / 3.0 + 5.0 * e * e / 9.0;
}

double bbpssw_fidelity(double F) {
  if (!(F > 0.25 && F <= 1.0)) throw std::invalid_argument("purification needs 1/4 < F <= 1");
  const double e = 1.0 - F;
  return (F * F + e * e / 9.0) / bbpssw_success_probability(F);
}

PurifyResult purify(double F, std::int64_t n_pairs, Rng& rng) {
  if (n_pairs < 0) throw std::invalid_argument("purify: n_pairs must be >= 0");
  PurifyResult r{0, bbpssw_fidelity(F), bbpssw_success_probability(F)};
  for (std::int64_t i = 0; i < n_pairs / 2; ++i)
    if (r.success_probability >= 1.0 || rng.bernoulli(r.success_probability)) ++r.surviving_pairs;
  return r;
}

TeleportBandwidthReport teleport_bandwidth(double distance_m, const MaterialParams& m,
                                           const TeleportBandwidthAssumptions& a) {
  if (!(distance_m > 0)) throw std::invalid_argument("teleport_bandwidth: distance must be positive");
  if (a.purification_rounds < 0) throw std::invalid_argument("teleport_bandwidth: rounds must be >= 0");
  if (!(a.teleport_overhead > 0)) throw std::invalid_argument("teleport_bandwidth: overhead must be positive");
  if (a.classical_latency < 0) throw std::invalid_argument("teleport_bandwidth: latency must be >= 0");
  TeleportBandwidthReport r{};
  r.distance_m = distance_m;
  r.assumptions = a;
  const double x = distance_m / m.dot_pitch;
  const double nearest = std::round(x);
  r.hops = static_cast<std::int64_t>(std::abs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : std::ceil(x));
  if (r.hops < 1) r.hops = 1;
  r.t_hop = swap_duration(m.J_on) / 10.0;
  r.lambda = channel_lambda(r.t_hop, m.noise.T2);
  const auto reach = static_cast<std::int64_t>(std::floor(max_distance(r.lambda, a.fidelity_threshold)));
  if (reach < 1) throw std::invalid_argument("teleport_bandwidth: tunnel reach is below one hop");
  r.segments = (r.hops + reach - 1) / reach;
  r.hops_per_segment = (r.hops + r.segments - 1) / r.segments;
  double F = channel_fidelity(r.lambda, static_cast<double>(r.hops_per_segment));
  r.purification_yield = 1.0;
  for (int i = 0; i < a.purification_rounds; ++i) {
    r.purification_yield *= bbpssw_success_probability(F) / 2.0;
    F = bbpssw_fidelity(F);
  }
  r.segment_fidelity = F;
  r.end_to_end_fidelity = std::pow(F, static_cast<double>(r.segments));
  r.segment_rate = 1.0 / (static_cast<double>(r.hops_per_segment) * r.t_hop);
  const double pair_rate = r.segment_rate * r.purification_yield * a.teleport_overhead;
  r.bandwidth = a.classical_latency > 0 ? r.end_to_end_fidelity / (1.0 / pair_rate + a.classical_latency)
                                        : r.end_to_end_fidelity * pair_rate;
  return r;
}

Json to_json(const TeleportBandwidthReport& r) {
  Json j;
  j["distance_m"] = r.distance_m;
  j["hops"] = r.hops;
  j["segments"] = r.segments;
  j["hops_per_segment"] = r.hops_per_segment;
  j["t_hop_s"] = r.t_hop;
  j["lambda"] = r.lambda;
  j["segment_fidelity"] = r.segment_fidelity;
  j["end_to_end_fidelity"] = r.end_to_end_fidelity;
  j["segment_rate_per_s"] = r.segment_rate;
  j["purification_yield"] = r.purification_yield;
  j["true_bandwidth_bps"] = r.bandwidth;
  Json as;
  as["segment_length_rule"] = "floor(ln(1 - threshold) / (-lambda)) tunnel hops";
  as["fidelity_threshold"] = r.assumptions.fidelity_threshold;
  as["purification_rounds"] = r.assumptions.purification_rounds;
  as["purification_protocol"] = "BBPSSW recurrence on Werner pairs";
  as["teleport_overhead"] = r.assumptions.teleport_overhead;
  as["classical_latency_s"] = r.assumptions.classical_latency;
  as["segments_in_parallel"] = true;
  as["entanglement_swapping"] = "ideal and instantaneous";
  as["tunnel_hop"] = "t_swap / 10";
  j["assumptions"] = std::move(as);
  return j;
}

}  // namespace qdot
