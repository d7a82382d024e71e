#pragma once

// Markovian T1/T2 decoherence: exact single-qubit channels on density
// matrices, and a seeded quantum-trajectory unraveling for state vectors.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdot/qstate.hpp"

namespace qdot {

class NoiseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NoiseParams {
  double T1 = 200e-6;  // s
  double T2 = 100e-6;  // s
  bool enabled = true;

  /// Throws unless T1 > 0, T2 > 0 and T2 <= 2 T1.
  void validate() const;

  /// 1/T2' = 1/T2 - 1/(2 T1); zero when T2 = 2 T1.
  double pure_dephasing_rate() const;
};

// ---------------------------------------------------------------------------
// Kraus operators

/// Coherence multiplied by exp(-t/T2): K0 = sqrt((1+e)/2) I, K1 = sqrt((1-e)/2) Z.
template <typename Real = double>
std::array<Operator<Real>, 2> dephasing_kraus(double t, double T2) {
  if (t < 0) throw NoiseError("dephasing time must be >= 0");
  if (!(T2 > 0)) throw NoiseError("T2 must be positive");
  const Real e = Real(std::exp(-t / T2));
  Operator<Real> k0 = Operator<Real>::Identity(2, 2) * std::sqrt((1 + e) / 2);
  Operator<Real> k1 = Operator<Real>::Zero(2, 2);
  k1(0, 0) = std::sqrt((1 - e) / 2);
  k1(1, 1) = -std::sqrt((1 - e) / 2);
  return {k0, k1};
}

/// Decay toward |0> with gamma = 1 - exp(-t/T1).
template <typename Real = double>
std::array<Operator<Real>, 2> amplitude_damping_kraus(double t, double T1) {
  if (t < 0) throw NoiseError("damping time must be >= 0");
  if (!(T1 > 0)) throw NoiseError("T1 must be positive");
  const Real gamma = Real(-std::expm1(-t / T1));
  Operator<Real> k0 = Operator<Real>::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - gamma);
  Operator<Real> k1 = Operator<Real>::Zero(2, 2);
  k1(0, 1) = std::sqrt(gamma);
  return {k0, k1};
}

// ---------------------------------------------------------------------------
// Exact channels (density-matrix form only)

namespace detail {
template <typename Real>
void require_matrix(const QuantumState<Real>& state) {
  if (state.is_vector())
    throw NoiseError("exact noise channels need a density matrix; use sample_trajectory for vectors");
}
}  // namespace detail

template <typename Real>
QuantumState<Real> dephase(QuantumState<Real> state, int qubit, double t, double T2) {
  detail::require_matrix(state);
  const auto k = dephasing_kraus<Real>(t, T2);
  state.apply_channel(k, qubit);
  return state;
}

template <typename Real>
QuantumState<Real> amplitude_damp(QuantumState<Real> state, int qubit, double t, double T1) {
  detail::require_matrix(state);
  const auto k = amplitude_damping_kraus<Real>(t, T1);
  state.apply_channel(k, qubit);
  return state;
}

/// Idle evolution of one qubit for `t`: amplitude damping with T1 followed by
/// pure dephasing at rate 1/T2', so coherences decay as exp(-t/T2) overall.
template <typename Real>
QuantumState<Real> idle_channel(QuantumState<Real> state, int qubit, double t, const NoiseParams& params) {
  detail::require_matrix(state);
  if (!params.enabled || t == 0) return state;
  params.validate();
  state = amplitude_damp(std::move(state), qubit, t, params.T1);
  const double rate = params.pure_dephasing_rate();
  if (rate > 0) state = dephase(std::move(state), qubit, t, 1.0 / rate);
  return state;
}

// ---------------------------------------------------------------------------
// Pulse schedules and trajectories

enum class PulseKind { init, rabi, exchange, tunnel_hop, readout, idle };

std::string to_string(PulseKind kind);

struct PulseEvent {
  PulseKind kind = PulseKind::idle;
  std::optional<Gate> gate;  // ideal unitary applied at the start of the window
  double duration = 0.0;  // s
  double energy = 0.0;  // J dissipated by the drive, 0 when not modeled
};

struct PulseSchedule {
  std::vector<PulseEvent> events;

  double total_duration() const;
  double total_energy() const;
};

/// One quantum-trajectory step of idle noise on `qubit` of a vector state:
/// a damping jump (Kraus sampling of the amplitude-damping channel, so the
/// jump probability is gamma times the excited population) and a Z flip with
/// probability (1 - exp(-dt/T2'))/2.
void trajectory_idle_step(State& state, int qubit, double dt, const NoiseParams& params, Rng& rng);

/// One stochastic unraveling of `schedule`: each event applies its gate, then
/// idle noise on every qubit over its duration, split into steps no longer
/// than `max_step`.
State sample_trajectory(const State& initial, const PulseSchedule& schedule, const NoiseParams& params,
                        std::uint64_t seed,
                        double max_step = std::numeric_limits<double>::infinity());

/// Average of |psi><psi| over `n` trajectories (seeds seed, seed+1, ...).
DensityMatrix<double> average_trajectories(const State& initial, const PulseSchedule& schedule,
                                           const NoiseParams& params, std::uint64_t seed, int n);

}  // namespace qdot
