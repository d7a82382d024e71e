#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qdot/noise.hpp"

using namespace qdot;

namespace {

State plus_state() {
  State s = State::zero(1, Representation::matrix);
  s.apply(gates::h(0));
  return s;
}

State excited_state() {
  State s = State::zero(1, Representation::matrix);
  s.apply(gates::x(0));
  return s;
}

// Exact channel on the density matrix for the same schedule the trajectories run.
DensityMatrix<double> channel_reference(const State& initial, const PulseSchedule& schedule, const NoiseParams& p) {
  State rho = initial.to_matrix();
  for (const auto& e : schedule.events) {
    if (e.gate) rho.apply(*e.gate);
    for (int q = 0; q < rho.n_qubits(); ++q) rho = idle_channel(rho, q, e.duration, p);
  }
  return rho.density_matrix();
}

}  // namespace

TEST(Kraus, CompletenessHolds) {
  for (double t : {0.0, 1e-9, 3e-6, 1e-4, 1e-2}) {
    for (const auto& ks : {dephasing_kraus<double>(t, 100e-6), amplitude_damping_kraus<double>(t, 200e-6)}) {
      oracle::Mat sum = oracle::Mat::Zero(2, 2);
      for (const auto& k : ks) sum += k.adjoint() * k;
      EXPECT_LT(oracle::max_abs(sum - oracle::I2()), 1e-14) << t;
    }
  }
}

TEST(Dephasing, CoherenceDecaysAsExpMinusTOverT2) {
  const double T2 = 100e-6;
  for (double t : {1e-7, 1e-5, 1e-4, 5e-4}) {
    const State s = dephase(plus_state(), 0, t, T2);
    EXPECT_NEAR(s.density_matrix()(0, 1).real(), 0.5 * std::exp(-t / T2), 1e-14);
    EXPECT_NEAR(s.density_matrix()(0, 0).real(), 0.5, 1e-14);
  }
}

TEST(AmplitudeDamping, ExcitedPopulationDecaysAsExpMinusTOverT1) {
  const double T1 = 200e-6;
  for (double t : {1e-7, 1e-5, 2e-4, 1e-3}) {
    const State s = amplitude_damp(excited_state(), 0, t, T1);
    EXPECT_NEAR(s.density_matrix()(1, 1).real(), std::exp(-t / T1), 1e-14);
    EXPECT_NEAR(s.density_matrix().trace().real(), 1.0, 1e-14);
  }
}

TEST(IdleChannel, CombinedCoherenceDecaysWithT2AndPopulationWithT1) {
  NoiseParams p{150e-6, 100e-6, true};
  for (double t : {1e-6, 5e-5, 3e-4}) {
    const State a = idle_channel(plus_state(), 0, t, p);
    EXPECT_NEAR(std::abs(a.density_matrix()(0, 1)), 0.5 * std::exp(-t / p.T2), 1e-14);
    const State b = idle_channel(excited_state(), 0, t, p);
    EXPECT_NEAR(b.density_matrix()(1, 1).real(), std::exp(-t / p.T1), 1e-14);
  }
}

TEST(IdleChannel, TwoT1LimitHasNoPureDephasing) {
  NoiseParams p{100e-6, 200e-6, true};
  EXPECT_EQ(p.pure_dephasing_rate(), 0.0);
  const State a = idle_channel(plus_state(), 0, 50e-6, p);
  EXPECT_NEAR(std::abs(a.density_matrix()(0, 1)), 0.5 * std::exp(-50e-6 / 200e-6), 1e-14);
}

TEST(IdleChannel, DisabledOrZeroTimeIsIdentity) {
  NoiseParams off{200e-6, 100e-6, false};
  const State s = plus_state();
  EXPECT_EQ(oracle::max_abs(idle_channel(s, 0, 1e-3, off).density_matrix() - s.density_matrix()), 0.0);
  NoiseParams on{};
  EXPECT_EQ(oracle::max_abs(idle_channel(s, 0, 0.0, on).density_matrix() - s.density_matrix()), 0.0);
}

TEST(Validation, RejectsUnphysicalParameters) {
  EXPECT_THROW((NoiseParams{100e-6, 300e-6, true}.validate()), NoiseError);
  EXPECT_THROW((NoiseParams{-1.0, 1.0, true}.validate()), NoiseError);
  EXPECT_THROW(dephasing_kraus<double>(-1.0, 1.0), NoiseError);
  EXPECT_THROW(amplitude_damping_kraus<double>(1.0, 0.0), NoiseError);
  EXPECT_THROW(dephase(State::zero(1), 0, 1e-6, 1e-4), NoiseError);
}

TEST(Trajectory, RequiresVectorState) {
  PulseSchedule sched;
  EXPECT_THROW(sample_trajectory(plus_state(), sched, NoiseParams{}, 1), NoiseError);
}

TEST(Trajectory, SameSeedSameTrajectory) {
  State s = State::zero(2);
  PulseSchedule sched;
  sched.events.push_back({PulseKind::rabi, gates::h(0), 30e-6, 0.0});
  sched.events.push_back({PulseKind::exchange, gates::cnot(0, 1), 40e-6, 0.0});
  const NoiseParams p{};
  const State a = sample_trajectory(s, sched, p, 77, 5e-6);
  const State b = sample_trajectory(s, sched, p, 77, 5e-6);
  EXPECT_EQ((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Trajectory, ScheduleTotals) {
  PulseSchedule sched;
  sched.events.push_back({PulseKind::rabi, gates::h(0), 1e-9, 2e-17});
  sched.events.push_back({PulseKind::idle, std::nullopt, 3e-9, 0.0});
  EXPECT_DOUBLE_EQ(sched.total_duration(), 4e-9);
  EXPECT_DOUBLE_EQ(sched.total_energy(), 2e-17);
}

// Trajectory averages converge to the exact channel with error ~ 1/sqrt(N).
TEST(Trajectory, AverageConvergesToChannelAtInverseSqrtN) {
  const NoiseParams p{150e-6, 100e-6, true};
  State init = State::zero(2);
  init.apply(gates::h(0));
  init.apply(gates::x(1));
  PulseSchedule sched;
  sched.events.push_back({PulseKind::exchange, gates::cnot(0, 1), 40e-6, 0.0});
  sched.events.push_back({PulseKind::rabi, gates::h(1), 30e-6, 0.0});
  const oracle::Mat exact = channel_reference(init, sched, p);

  const std::vector<int> sizes{100, 1000, 10000};
  const int reps = 12;
  std::vector<double> rms;
  std::uint64_t seed = 1000;
  for (int n : sizes) {
    double acc = 0;
    for (int r = 0; r < reps; ++r) {
      const oracle::Mat avg = average_trajectories(init, sched, p, seed, n);
      seed += static_cast<std::uint64_t>(n);
      const double err = (avg - exact).norm();
      acc += err * err;
    }
    rms.push_back(std::sqrt(acc / reps));
  }
  // least-squares slope of log(err) vs log(N)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = std::log(double(sizes[i])), y = std::log(rms[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = double(sizes.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  EXPECT_NEAR(slope, -0.5, 0.1) << rms[0] << " " << rms[1] << " " << rms[2];
  EXPECT_LT(rms.back(), 0.02);
}

TEST(Trajectory, SingleQubitPopulationMatchesT1) {
  const NoiseParams p{200e-6, 100e-6, true};
  PulseSchedule sched;
  sched.events.push_back({PulseKind::idle, std::nullopt, 100e-6, 0.0});
  State one = State::zero(1);
  one.apply(gates::x(0));
  const int n = 20000;
  const auto avg = average_trajectories(one, sched, p, 5, n);
  const double expected = std::exp(-0.5);
  EXPECT_NEAR(avg(1, 1).real(), expected, 4 * std::sqrt(expected * (1 - expected) / n));
}
