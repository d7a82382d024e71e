#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qdot/json_io.hpp"
#include "qdot/noise.hpp"

namespace qdot {

/// Per-material device parameters. Energies in eV, lengths in m, times in s.
struct MaterialParams {
  std::string name = "inas";
  double g_factor = -10.0;
  double delta_E_orb = 10e-3;
  double U_charging = 2e-3;
  double J_on = 5e-6;
  double J_off = 5e-9;
  double dot_pitch = 100e-9;  // qubit-to-qubit separation
  double gate_distance = 100e-9;  // D-gate metal to dot
  NoiseParams noise{};
  double t_pulse = 2e-11;  // one gate pulse at sub-THz rate
  double readout_transfer = 100e-12;
  double readout_measure = 1e-9;
  double rabi_period = 100e-9;  // full Rabi cycle of the microwave drive
  double termination_ohms = 50.0;
  bool long_coherence = false;

  /// Throws std::invalid_argument on J_on <= J_off, non-positive pitch, etc.
  void validate() const;
};

/// InAs enhancement-dot parameters (the default).
MaterialParams inas_preset();

/// Si MOS parameters. T2 has no default and is left NaN until set.
MaterialParams si_preset();

/// "inas" or "si"; throws std::invalid_argument for anything else.
MaterialParams material_preset(std::string_view name);

Json material_to_json(const MaterialParams& m);

/// Either a preset name, or an object with an optional "preset" key plus
/// field overrides (T1/T2/noise_enabled address the noise block).
MaterialParams material_from_json(const Json& j);

}  // namespace qdot
