#pragma once

// Qubit transport over the dot array: swap chains, tunneling routes and
// teleportation, with the fidelity/latency/bandwidth model f = exp(-lambda d).

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qdot/device.hpp"
#include "qdot/json_io.hpp"
#include "qdot/material.hpp"
#include "qdot/rng.hpp"

namespace qdot {

enum class ChannelKind { swap, tunnel, teleport };

std::string to_string(ChannelKind kind);
std::optional<ChannelKind> channel_kind_from_string(std::string_view name);

class RoutingError : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

struct ChannelSpec {
  ChannelKind kind = ChannelKind::swap;
  std::vector<GridPos> path;  // source first
  double lambda = 1e-6;  // error per hop
  double t_hop = 1e-10;  // s
  double fidelity_threshold = 1e-4;

  /// Hops along the path (path length in qubits).
  int hops() const { return path.empty() ? 0 : static_cast<int>(path.size()) - 1; }

  /// Distinct, consecutive-adjacent positions; lambda in (0, 1); t_hop > 0.
  void validate() const;
};

/// (0,0), (1,0), ... (hops,0).
std::vector<GridPos> straight_path(int hops);

/// ChannelSpec for `kind` with hop time and lambda derived from the material:
/// swap hops take t_swap = pi hbar / J_on, tunnel hops t_swap / 10, and
/// lambda = t_hop / T2.
ChannelSpec make_channel_spec(ChannelKind kind, std::vector<GridPos> path, const MaterialParams& m);

struct MaxDistance {
  double threshold;
  double qubits;
};

struct TimedRoute {
  std::vector<GridPos> path;
  double t_start;
  double t_end;
};

struct Conflict {
  GridPos pos;
  std::size_t route_a;
  std::size_t route_b;
  double t_start;  // overlap of the two windows
  double t_end;
};

struct ChannelReport {
  ChannelKind kind;
  int hops;
  double lambda;
  double t_hop;
  double fidelity;
  double latency;
  double physical_bandwidth;  // 1 / latency
  double true_bandwidth;  // physical_bandwidth * fidelity
  double max_distance_qubits;  // at spec.fidelity_threshold
  std::vector<MaxDistance> max_distance_table;  // thresholds 1e-4 and 1e-5
  std::vector<Conflict> conflicts;
};

/// lambda = t_op / T2.
double channel_lambda(double t_op, double T2);

/// exp(-lambda d).
double channel_fidelity(double lambda, double d);

/// Largest d with exp(-lambda d) >= 1 - threshold: ln(1 - threshold) / (-lambda).
double max_distance(double lambda, double threshold);

/// Swap chain: every position on the path must hold an electron when
/// `array` is given.
ChannelReport swap_channel_metrics(const ChannelSpec& spec, const DotArray* array = nullptr);

/// Tunneling route: every position after the source must be empty when
/// `array` is given.
ChannelReport tunnel_channel_metrics(const ChannelSpec& spec, const DotArray* array = nullptr);

/// Explanation attached to every report's max-distance table.
extern const char* const kMaxDistanceNote;

Json to_json(const ChannelReport& r);
Json to_json(const Conflict& c);

/// Breadth-first shortest path from occupied `src` to empty `dst` through
/// empty dots, neighbours tried in the order +x, +y, -x, -y. Readout dots and
/// `blocked` positions are not entered. Throws RoutingError when unreachable.
std::vector<GridPos> plan_tunnel_route(const DotArray& array, GridPos src, GridPos dst,
                                       const std::set<GridPos>& blocked = {});

/// Moves the electron along `path` one hop at a time.
void execute_route(DotArray& array, std::span<const GridPos> path);

/// One flag per (pair of routes, shared position) whose time windows overlap.
std::vector<Conflict> detect_conflicts(std::span<const TimedRoute> routes);

/// H on `a` then the exchange C-NOT a -> b. Strict mode requires the pair in |00>.
void make_epr(DotArray& array, GridPos a, GridPos b);

/// Fidelity of the (a, b) reduced state to (|00> + |11>)/sqrt(2).
double bell_fidelity(const DotArray& array, GridPos a, GridPos b);

struct TeleportOptions {
  std::optional<int> force_phase;  // X-basis outcome on c
  std::optional<int> force_amplitude;  // Z-basis outcome on a
  double classical_latency = 0.0;  // s, idle before the corrections
};

struct TeleportResult {
  int phase_bit;
  int amplitude_bit;
  double branch_probability;  // 1 unless outcomes were forced
};

/// Teleports the state of `c` onto `b` using the EPR pair (a, b): C-NOT
/// c -> a, X measurement of c, Z measurement of a, then X^m_a and Z^m_c on b.
TeleportResult teleport(DotArray& array, GridPos c, GridPos a, GridPos b, Rng& rng,
                        const TeleportOptions& options = {});

struct PurifyResult {
  std::int64_t surviving_pairs;
  double fidelity;
  double success_probability;
};

/// One BBPSSW recurrence round on Werner pairs of fidelity F.
double bbpssw_fidelity(double F);
double bbpssw_success_probability(double F);

/// Pairs up `n_pairs` Werner pairs; each attempt survives with the round's
/// success probability. Throws for F <= 1/4 or F > 1.
PurifyResult purify(double F, std::int64_t n_pairs, Rng& rng);

struct TeleportBandwidthAssumptions {
  double fidelity_threshold = 1e-4;  // sets the tunnel segment length
  int purification_rounds = 0;
  double teleport_overhead = 1.0;  // multiplies the delivered pair rate
  double classical_latency = 0.0;  // s, added per teleported qubit
};

struct TeleportBandwidthReport {
  double distance_m;
  std::int64_t hops;
  std::int64_t segments;
  std::int64_t hops_per_segment;
  double t_hop;
  double lambda;
  double segment_fidelity;  // after purification
  double end_to_end_fidelity;
  double segment_rate;  // EPR halves per second on one segment
  double purification_yield;
  double bandwidth;
  TeleportBandwidthAssumptions assumptions;
};

/// EPR halves are carried over tunnel segments no longer than the tunnel
/// reach at the threshold; segments run in parallel and are joined by
/// entanglement swapping. Each purification round consumes two pairs per
/// output and succeeds with the BBPSSW probability.
TeleportBandwidthReport teleport_bandwidth(double distance_m, const MaterialParams& m,
                                           const TeleportBandwidthAssumptions& a = {});

Json to_json(const TeleportBandwidthReport& r);

}  // namespace qdot
