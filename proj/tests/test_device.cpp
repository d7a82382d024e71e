#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qdot/device.hpp"
#include "qdot/pulses.hpp"

using namespace qdot;

namespace {

MaterialParams quiet() {
  MaterialParams m = inas_preset();
  m.noise.enabled = false;
  return m;
}

DeviceOptions opts(Representation rep = Representation::vector, bool strict = false) {
  DeviceOptions o;
  o.representation = rep;
  o.strict = strict;
  return o;
}

}  // namespace

TEST(Blockade, SecondElectronIsRejected) {
  DotArray a(2, 2, quiet());
  a.init_qubit({0, 0});
  EXPECT_THROW(a.init_qubit({0, 0}), PhysicsError);
  EXPECT_EQ(a.occupied_count(), 1);
  EXPECT_EQ(a.state()->n_qubits(), 1);
}

TEST(Blockade, MoveIntoOccupiedDotIsRejected) {
  DotArray a(3, 1, quiet());
  a.init_qubit({0, 0});
  a.init_qubit({1, 0});
  EXPECT_THROW(a.move_electron({0, 0}, {1, 0}), PhysicsError);
}

TEST(Move, RequiresAdjacencyAndOccupiedSource) {
  DotArray a(3, 3, quiet());
  a.init_qubit({0, 0});
  EXPECT_THROW(a.move_electron({0, 0}, {1, 1}), PhysicsError);
  EXPECT_THROW(a.move_electron({0, 0}, {2, 0}), PhysicsError);
  EXPECT_THROW(a.move_electron({1, 0}, {2, 0}), PhysicsError);
  EXPECT_THROW(a.move_electron({0, 0}, {-1, 0}), PhysicsError);
  a.set_role({1, 0}, DotRole::readout);
  EXPECT_THROW(a.move_electron({0, 0}, {1, 0}), PhysicsError);
}

TEST(Move, NoiselessMoveKeepsStateAndCostsOneHop) {
  DotArray a(3, 1, quiet());
  a.init_qubit({0, 0});
  a.rabi_pulse({0, 0}, gates::rot(0, {1, 2, 3}, 1.1));
  const State before = *a.state();
  const double t0 = a.clock();
  a.move_electron({0, 0}, {1, 0});
  a.move_electron({1, 0}, {2, 0});
  EXPECT_NEAR(state_fidelity(*a.state(), before), 1.0, 1e-15);
  EXPECT_NEAR(a.clock() - t0, 2 * swap_duration(5e-6) / 10, 1e-22);
  EXPECT_FALSE(a.dot({0, 0}).occupied);
  EXPECT_TRUE(a.dot({2, 0}).occupied);
  EXPECT_EQ(a.qubit_at({2, 0}), 0);
  EXPECT_NO_THROW(a.check_invariants());
}

TEST(CouplingWindow, PiIsSwapInOneSwapTime) {
  DotArray a(2, 1, quiet());
  a.init_qubit({0, 0});
  a.init_qubit({1, 0});
  a.rabi_pulse({0, 0}, gates::x(0));
  const double t0 = a.clock();
  a.coupling_window({0, 0}, {1, 0}, oracle::kPi);
  EXPECT_NEAR(a.clock() - t0, 4.1357e-10, 1e-14);
  EXPECT_NEAR(std::norm(a.state()->amplitudes()(0b01)), 1.0, 1e-12);
}

TEST(CouplingWindow, ZeroIsNoOpAndNegativeIsError) {
  DotArray a(2, 1, quiet());
  a.init_qubit({0, 0});
  a.init_qubit({1, 0});
  const auto n = a.events().size();
  const double t = a.clock();
  a.coupling_window({0, 0}, {1, 0}, 0.0);
  EXPECT_EQ(a.events().size(), n);
  EXPECT_EQ(a.clock(), t);
  EXPECT_THROW(a.coupling_window({0, 0}, {1, 0}, -0.1), PhysicsError);
}

TEST(CouplingWindow, NonAdjacentOrEmptyIsError) {
  DotArray a(3, 1, quiet());
  a.init_qubit({0, 0});
  a.init_qubit({2, 0});
  EXPECT_THROW(a.coupling_window({0, 0}, {2, 0}, 1.0), PhysicsError);
  EXPECT_THROW(a.coupling_window({0, 0}, {1, 0}, 1.0), PhysicsError);
}

TEST(Residual, MicrosecondIdlePhase) {
  DotArray a(3, 1, quiet());
  a.init_qubit({0, 0});
  a.init_qubit({1, 0});
  const auto r = a.residual_coupling_error(1e-6);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0].theta, 5e-9 * 1e-6 / 6.582119569e-16, 1e-9);
  EXPECT_NEAR(r[0].theta, 7.596, 1e-3);
  EXPECT_THROW(a.residual_coupling_error(-1.0), PhysicsError);
}

TEST(Residual, StrictIdleAppliesOffCoupling) {
  DotArray a(2, 1, quiet(), opts(Representation::vector, true));
  a.init_qubit({0, 0});
  a.init_qubit({1, 0});
  a.rabi_pulse({0, 0}, gates::x(0));
  State expected = *a.state();
  const double t = 1e-7;
  a.idle(t);
  expected.apply(gates::exchange(0, 1, 5e-9 * t / constants::hbar));
  EXPECT_NEAR(state_fidelity(*a.state(), expected), 1.0, 1e-12);
  EXPECT_LT(std::norm(a.state()->amplitudes()(0b10)), 1.0 - 1e-3);
}

TEST(Readout, GroundAndExcited) {
  for (int bit : {0, 1}) {
    DotArray a(2, 1, quiet());
    a.set_role({1, 0}, DotRole::readout);
    a.init_qubit({0, 0});
    if (bit) a.rabi_pulse({0, 0}, gates::x(0));
    Rng rng(3);
    const double t0 = a.clock();
    const auto r = a.readout({0, 0}, {1, 0}, rng);
    EXPECT_EQ(r.bit, bit);
    EXPECT_EQ(r.charge_detected, bit == 0);
    EXPECT_NEAR(a.clock() - t0, 100e-12 + 1e-9, 1e-20);
  }
}

TEST(Readout, StatisticsOfSuperposition) {
  const int shots = 10000;
  int ones = 0;
  Rng rng(11);
  DotArray base(2, 1, quiet());
  base.set_role({1, 0}, DotRole::readout);
  base.init_qubit({0, 0});
  base.rabi_pulse({0, 0}, gates::rot(0, {0, 1, 0}, 2 * std::acos(std::sqrt(0.25))));
  for (int s = 0; s < shots; ++s) {
    DotArray a = base;
    ones += a.readout({0, 0}, {1, 0}, rng).bit;
  }
  const double p = 0.75;
  EXPECT_NEAR(ones / double(shots), p, 4 * std::sqrt(p * (1 - p) / shots));
}

TEST(Readout, ErrorRateFlipsReportedBit) {
  DeviceOptions o = opts();
  o.readout_error = 0.2;
  DotArray base(2, 1, quiet(), o);
  base.set_role({1, 0}, DotRole::readout);
  base.init_qubit({0, 0});
  Rng rng(12);
  int ones = 0;
  const int shots = 10000;
  for (int s = 0; s < shots; ++s) {
    DotArray a = base;
    ones += a.readout({0, 0}, {1, 0}, rng).bit;
  }
  EXPECT_NEAR(ones / double(shots), 0.2, 4 * std::sqrt(0.16 / shots));
}

TEST(Readout, RequiresEmptyReadoutDot) {
  DotArray a(3, 1, quiet());
  a.init_qubit({0, 0});
  a.init_qubit({1, 0});
  Rng rng(1);
  EXPECT_THROW(a.readout({0, 0}, {1, 0}, rng), PhysicsError);
  EXPECT_THROW(a.readout({0, 0}, {2, 0}, rng), PhysicsError);
}

TEST(Readout, ReadoutDotCannotHostQubit) {
  DotArray a(2, 1, quiet());
  a.set_role({1, 0}, DotRole::readout);
  EXPECT_THROW(a.init_qubit({1, 0}), PhysicsError);
}

TEST(Cnot, CompiledSequenceIsCnotUpToPhase) {
  for (auto [c, t] : {std::pair{0, 1}, std::pair{1, 0}}) {
    oracle::Mat u = oracle::Mat::Identity(4, 4);
    for (const Gate& g : compile_cnot(c, t)) {
      const oracle::Mat m = gate_matrix<double>(g);
      u = (gate_arity(g.kind) == 1 ? oracle::on(m, g.targets[0], 2) : oracle::two_qubit(m, g.targets[0], g.targets[1], 2)) * u;
    }
    EXPECT_LT(oracle::diff_up_to_phase(u, oracle::controlled(oracle::X(), c, t, 2)), 1e-12);
  }
}

TEST(Cnot, DeviceCnotOnAllBasisStates) {
  for (int in = 0; in < 4; ++in) {
    DotArray a(2, 2, quiet());
    a.init_qubit({0, 0});
    a.init_qubit({0, 1});
    if (in & 2) a.rabi_pulse({0, 0}, gates::x(0));
    if (in & 1) a.rabi_pulse({0, 1}, gates::x(0));
    a.cnot({0, 0}, {0, 1});
    const int out = (in & 2) ? (in ^ 1) : in;
    EXPECT_NEAR(std::norm(a.state()->amplitudes()(out)), 1.0, 1e-12) << in;
  }
}

TEST(Cnot, DurationIsTwoHalfSwapsPlusRabiRotations) {
  DotArray a(2, 1, quiet());
  a.init_qubit({0, 0});
  a.init_qubit({1, 0});
  const double t0 = a.clock();
  a.cnot({0, 0}, {1, 0});
  const double t_swap = swap_duration(5e-6);
  // H is a pi rotation; Rz(pi) pi; Rz(pi/2) and Rz(-pi/2) pi/2 each.
  const double rabi = (oracle::kPi + oracle::kPi + oracle::kPi + oracle::kPi / 2 + oracle::kPi / 2) / (2 * oracle::kPi) * 100e-9;
  EXPECT_NEAR(a.clock() - t0, t_swap + rabi, 1e-18);
  EXPECT_EQ(a.events().size(), 2u + 7u);
}

TEST(Clock, AccountsForEveryOperation) {
  MaterialParams m = quiet();
  DotArray a(3, 1, m);
  a.set_role({2, 0}, DotRole::readout);
  a.init_qubit({0, 0});
  a.rabi_pulse({0, 0}, gates::h(0));
  a.move_electron({0, 0}, {1, 0});
  a.idle(1e-8);
  Rng rng(0);
  a.readout({1, 0}, {2, 0}, rng);
  const double expected = m.t_pulse + 50e-9 + swap_duration(m.J_on) / 10 + 1e-8 + 1.1e-9;
  EXPECT_NEAR(a.clock(), expected, 1e-20);
  double sum = 0;
  for (const auto& e : a.events()) sum += e.clock_after - e.clock_before;
  EXPECT_NEAR(sum, a.clock(), 1e-20);
  EXPECT_NEAR(a.schedule().total_duration(), a.clock(), 1e-20);
  EXPECT_GT(a.schedule().total_energy(), 0.0);
}

TEST(Noise, MatrixModeIdleDephasesSuperposition) {
  MaterialParams m = inas_preset();
  DotArray a(1, 1, m, opts(Representation::matrix));
  a.init_qubit({0, 0});
  a.rabi_pulse({0, 0}, gates::h(0));
  a.idle(50e-6);
  // the gate lands at the start of its 50 ns window, so the coherence sees both windows
  const auto& rho = a.state()->density_matrix();
  EXPECT_NEAR(std::abs(rho(0, 1)), 0.5 * std::exp(-(50e-6 + 50e-9) / m.noise.T2), 1e-12);
}

TEST(Noise, PerDotT2Override) {
  MaterialParams m = inas_preset();
  DotArray a(2, 1, m, opts(Representation::matrix));
  a.init_qubit({0, 0});
  a.init_qubit({1, 0});
  a.set_T2_override({1, 0}, 10e-6);
  EXPECT_EQ(a.noise_for({1, 0}).T2, 10e-6);
  EXPECT_EQ(a.noise_for({0, 0}).T2, m.noise.T2);
  EXPECT_THROW(a.set_T2_override({0, 0}, 1.0), NoiseError);
}

TEST(Snapshot, ListsEveryDot) {
  DotArray a(2, 2, quiet());
  a.init_qubit({1, 1});
  const Json s = a.snapshot();
  EXPECT_EQ(s["dots"].size(), 4u);
  EXPECT_EQ(s["dots"][3]["qubit_id"], 0);
  EXPECT_EQ(s["dots"][0]["qubit_id"], nullptr);
}

TEST(Rotation, AngleOfStandardGates) {
  EXPECT_NEAR(rotation_angle(gate_matrix<double>(gates::x(0))), oracle::kPi, 1e-12);
  EXPECT_NEAR(rotation_angle(gate_matrix<double>(gates::h(0))), oracle::kPi, 1e-12);
  EXPECT_NEAR(rotation_angle(gate_matrix<double>(gates::s(0))), oracle::kPi / 2, 1e-7);
  EXPECT_NEAR(rotation_angle(gate_matrix<double>(gates::t(0))), oracle::kPi / 4, 1e-7);
  EXPECT_NEAR(rotation_angle(gate_matrix<double>(gates::rot(0, {1, 1, 0}, 0.7))), 0.7, 1e-7);
}
