#include "qdot/noise.hpp"

#include <algorithm>
#include <cmath>

namespace qdot {

void NoiseParams::validate() const {
  if (!(T1 > 0) || !(T2 > 0)) throw NoiseError("T1 and T2 must be positive");
  if (T2 > 2.0 * T1) throw NoiseError("unphysical noise: T2 > 2 T1");
}

double NoiseParams::pure_dephasing_rate() const {
  return std::max(0.0, 1.0 / T2 - 1.0 / (2.0 * T1));
}

std::string to_string(PulseKind kind) {
  switch (kind) {
    case PulseKind::init: return "init";
    case PulseKind::rabi: return "rabi";
    case PulseKind::exchange: return "exchange";
    case PulseKind::tunnel_hop: return "tunnel_hop";
    case PulseKind::readout: return "readout";
    case PulseKind::idle: return "idle";
  }
  return "?";
}

double PulseSchedule::total_duration() const {
  double t = 0;
  for (const auto& e : events) t += e.duration;
  return t;
}

double PulseSchedule::total_energy() const {
  double u = 0;
  for (const auto& e : events) u += e.energy;
  return u;
}

void trajectory_idle_step(State& state, int qubit, double dt, const NoiseParams& params, Rng& rng) {
  if (!params.enabled || dt <= 0) return;
  const std::array<int, 1> target{qubit};

  // Amplitude damping: pick K1 with probability ||K1 psi||^2.
  const double gamma = -std::expm1(-dt / params.T1);
  const double p_excited = outcome_probability(state, qubit, Basis::Z, 1);
  const auto kraus = amplitude_damping_kraus<double>(dt, params.T1);
  if (rng.uniform() < gamma * p_excited) {
    state.apply_operator(kraus[1], target);
  } else {
    state.apply_operator(kraus[0], target);
  }
  state.renormalize();

  const double rate = params.pure_dephasing_rate();
  const double p_flip = -0.5 * std::expm1(-dt * rate);
  if (rng.uniform() < p_flip) state.apply(gates::z(qubit));
}

State sample_trajectory(const State& initial, const PulseSchedule& schedule, const NoiseParams& params,
                        std::uint64_t seed, double max_step) {
  if (!initial.is_vector()) throw NoiseError("trajectory sampling needs a state vector");
  if (params.enabled) params.validate();
  if (!(max_step > 0)) throw NoiseError("max_step must be positive");
  Rng rng(seed);
  State state = initial;
  for (const auto& event : schedule.events) {
    if (event.duration < 0) throw NoiseError("negative pulse duration");
    if (event.gate) state.apply(*event.gate);
    if (!params.enabled || event.duration == 0) continue;
    const auto steps = static_cast<long>(std::max(1.0, std::ceil(event.duration / max_step)));
    const double dt = event.duration / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s)
      for (int q = 0; q < state.n_qubits(); ++q) trajectory_idle_step(state, q, dt, params, rng);
  }
  return state;
}

DensityMatrix<double> average_trajectories(const State& initial, const PulseSchedule& schedule,
                                           const NoiseParams& params, std::uint64_t seed, int n) {
  DensityMatrix<double> acc = DensityMatrix<double>::Zero(initial.dim(), initial.dim());
  for (int i = 0; i < n; ++i) {
    const State s = sample_trajectory(initial, schedule, params, seed + static_cast<std::uint64_t>(i));
    acc += s.density();
  }
  return acc / static_cast<double>(n);
}

}  // namespace qdot
