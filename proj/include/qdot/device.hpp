#pragma once

// The 2D enhancement-dot array. Each dot is empty or holds exactly one
// electron; every occupied dot carries one qubit of the array's register.
// Every operation advances the array clock by its duration and applies idle
// noise to all qubits for that duration.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdot/json_io.hpp"
#include "qdot/material.hpp"
#include "qdot/noise.hpp"
#include "qdot/qstate.hpp"

namespace qdot {

struct GridPos {
  int x = 0;
  int y = 0;
  auto operator<=>(const GridPos&) const = default;
};

std::string to_string(GridPos p);

enum class DotRole { qubit, empty, readout, intermediary };

std::string to_string(DotRole role);
std::optional<DotRole> dot_role_from_string(std::string_view name);

struct Dot {
  bool occupied = false;
  std::optional<int> qubit_id;  // index into the register
  DotRole role = DotRole::empty;
  std::optional<double> T2_override;
};

/// A violation of device physics or geometry (blockade, adjacency, roles).
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeviceOptions {
  Representation representation = Representation::vector;
  bool strict = false;  // residual off-coupling and ground-state preconditions
  double readout_error = 0.0;  // probability of flipping the reported bit
  std::uint64_t noise_seed = 0;  // trajectory noise in vector mode
  StateLimits limits{};
};

struct DeviceEvent {
  std::string name;
  double clock_before;
  double clock_after;
  PulseEvent pulse;
};

struct ReadoutResult {
  int bit;  // 0 = ground (spin up)
  bool charge_detected;  // the electron tunneled to the readout dot
};

struct ResidualPhase {
  GridPos a;
  GridPos b;
  double theta;  // J_off t / hbar
};

class DotArray {
 public:
  DotArray(int width, int height, MaterialParams material, DeviceOptions options = {});

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(GridPos p) const;
  static bool adjacent(GridPos a, GridPos b);
  const Dot& dot(GridPos p) const;
  void set_role(GridPos p, DotRole role);
  void set_T2_override(GridPos p, double T2);

  const MaterialParams& material() const { return material_; }
  const DeviceOptions& options() const { return options_; }
  double clock() const { return clock_; }
  int occupied_count() const;

  /// Register over occupied dots; nullopt before the first init.
  const std::optional<State>& state() const { return state_; }
  int qubit_at(GridPos p) const;
  std::optional<GridPos> position_of(int qubit) const;

  /// Single spin-up electron enters an empty dot; the register gains a |0> qubit.
  void init_qubit(GridPos p);

  /// Tunnels the electron to an empty 4-neighbour, carrying its spin state.
  void move_electron(GridPos from, GridPos to);

  /// J-gate window: exchange at J_on for theta hbar / J_on.
  void coupling_window(GridPos a, GridPos b, double theta);

  /// Any single-qubit gate realised as one Rabi rotation.
  void rabi_pulse(GridPos p, const Gate& gate);

  /// C-NOT compiled from two sqrt(SWAP) exchange windows plus Rabi rotations.
  void cnot(GridPos control, GridPos target);

  /// Spin-to-charge conversion into an empty readout dot, then SET detection.
  ReadoutResult readout(GridPos qubit, GridPos readout_dot, Rng& rng);

  /// Projective measurement with readout timing, without a readout dot
  /// (used where the protocol only needs the classical bit).
  int measure(GridPos qubit, Basis basis, Rng& rng);

  /// Same timing as measure(), with the outcome forced; returns its probability.
  /// Throws when the outcome has probability below 1e-12.
  double postselect(GridPos qubit, Basis basis, int outcome);

  /// Ideal free evolution (noise and, in strict mode, residual coupling).
  void idle(double t);

  /// J_off t / hbar for every adjacent occupied pair.
  std::vector<ResidualPhase> residual_coupling_error(double idle_t) const;

  /// Replaces the register through `fn` as one timed operation (used by the
  /// error-correction layer for compiled encode/decode blocks).
  void transform_state(const std::function<State(State)>& fn, double duration, const std::string& name,
                       PulseKind kind = PulseKind::rabi);

  const std::vector<DeviceEvent>& events() const { return events_; }
  PulseSchedule schedule() const;

  /// {width, height, dots[{x, y, occupied, role, qubit_id}], clock}
  Json snapshot() const;

  /// Throws PhysicsError on any broken structural invariant.
  void check_invariants() const;

  NoiseParams noise_for(GridPos p) const;

 private:
  Dot& dot_mut(GridPos p);
  void require_in_bounds(GridPos p) const;
  void require_occupied(GridPos p) const;
  void apply_gate_now(const Gate& g);
  void advance(const std::string& name, PulseEvent pulse, std::optional<std::pair<GridPos, GridPos>> active = {});

  int width_;
  int height_;
  MaterialParams material_;
  DeviceOptions options_;
  std::vector<Dot> dots_;
  std::optional<State> state_;
  double clock_ = 0.0;
  std::vector<DeviceEvent> events_;
  Rng noise_rng_;
};

/// SU(2) rotation angle of a single-qubit unitary, 2 acos(|tr U| / 2).
double rotation_angle(const Operator<double>& u);

/// The exchange-based C-NOT sequence on register qubits (control, target).
std::vector<Gate> compile_cnot(int control, int target);

}  // namespace qdot
