#pragma once

// Five-qubit [[5,1,3]] code (stabilizers XZZXI and cyclic shifts), cat
// states, parity measurement and the pulse budget of a correction cycle.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdot/device.hpp"
#include "qdot/json_io.hpp"
#include "qdot/material.hpp"
#include "qdot/qstate.hpp"
#include "qdot/rng.hpp"

namespace qdot {

class QecError : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

enum class Pauli { I, X, Y, Z };

char to_char(Pauli p);
std::optional<Pauli> pauli_from_char(char c);
Operator<double> pauli_matrix(Pauli p);

/// Product up to phase.
Pauli pauli_product(Pauli a, Pauli b);

struct LogicalQubit {
  int principal = 0;
  std::array<int, 4> syndrome{1, 2, 3, 4};
  bool encoded = false;

  /// Code position k (0 = principal, 1..4 = syndrome qubits) -> register index.
  int qubit(int position) const { return position == 0 ? principal : syndrome[static_cast<std::size_t>(position - 1)]; }

  /// Throws unless the five indices are distinct and inside an n-qubit register.
  void validate(int n_qubits) const;
};

/// Encoder on code positions, in time order, over {X, Y, Z, H, S, CNOT}.
std::vector<Gate> encoder_circuit(const LogicalQubit& lq);

/// 32x32 encoding unitary on code positions (position 0 most significant).
const Operator<double>& encoder_unitary();

void encode5(State& state, LogicalQubit& lq);
void decode5(State& state, LogicalQubit& lq);

struct SyndromeEntry {
  Pauli error = Pauli::I;
  int position = -1;  // -1 for no error
  Pauli correction = Pauli::I;  // applied to the decoded principal
};

/// Syndrome bits (syndrome qubit 0 most significant) after decoding, for
/// every single-qubit Pauli error. Derived from the encoder: bit j is set when
/// the error anticommutes with E Z_j E^dagger.
const std::map<std::uint8_t, SyndromeEntry>& syndrome_table();

std::string syndrome_bits(std::uint8_t s);

struct InjectedError {
  Pauli pauli;
  int position;  // code position 0..4
};

struct QecCycleReport {
  std::uint8_t syndrome = 0;
  SyndromeEntry diagnosis;
  int injected_weight = 0;  // net weight of the injected Pauli string
  bool possible_logical_error = false;
  int pulse_count = 0;
};

/// Injects `errors`, decodes, measures the syndrome qubits, corrects the
/// principal, resets the syndrome qubits and re-encodes.
QecCycleReport qec_cycle(State& state, LogicalQubit& lq, std::span<const InjectedError> errors, Rng& rng);

Json to_json(const QecCycleReport& r);

/// Pulses of one compiled cycle with the code on a linear chain of five dots
/// (principal first): one per single-qubit gate, seven per C-NOT, and two
/// exchange SWAPs per extra hop to bring distant qubits together.
struct CyclePulseCount {
  int encode = 0;
  int decode = 0;
  int readout = 4;
  int correction = 1;
  int total() const { return encode + decode + readout + correction; }
};

CyclePulseCount cycle_pulse_count();

/// H on the first dot then a C-NOT chain; the positions must form a chain of
/// nearest neighbours.
void make_cat(DotArray& array, std::span<const GridPos> qubits);
void uncreate_cat(DotArray& array, std::span<const GridPos> qubits);

struct ParityResult {
  int bit;
  State state;
};

/// Z-parity of `qubits` via C-NOT fan-in onto a fresh ancilla, which is
/// measured and returned to |0>.
ParityResult parity_measure(State state, std::span<const int> qubits, int ancilla, Rng& rng);

struct PulseBudget {
  int pulses_per_cycle;
  double t_pulse;
  double T2;
  double cycle_time;
  std::int64_t cycles_in_T2;
};

/// cycles_in_T2 = floor(T2 / (pulses_per_cycle t_pulse)).
PulseBudget pulse_budget(const MaterialParams& m, int pulses_per_cycle = 500);

Json to_json(const PulseBudget& b);

struct QecRunReport {
  int cycles;
  double p;
  std::uint64_t seed;
  int logical_errors;
  double logical_error_rate;
  std::map<std::string, int> syndrome_histogram;
  CyclePulseCount pulses;
};

/// `cycles` correction cycles on the payload (|0> + e^{i pi/4}|1>)/sqrt(2).
/// Each pulse of the compiled cycle injects, with probability p, a uniformly
/// random X/Y/Z on a uniformly random code qubit. A cycle whose decoded
/// principal differs from the payload counts as a logical error and the
/// code block is re-prepared.
QecRunReport run_qec(int cycles, double p, std::uint64_t seed);

Json to_json(const QecRunReport& r);

}  // namespace qdot
