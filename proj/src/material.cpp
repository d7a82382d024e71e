#include "qdot/material.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qdot {

void MaterialParams::validate() const {
  if (!(J_off > 0) || !(J_on > J_off)) throw std::invalid_argument("material: need J_on > J_off > 0");
  if (!(dot_pitch > 0)) throw std::invalid_argument("material: dot_pitch must be positive");
  if (!(gate_distance > 0)) throw std::invalid_argument("material: gate_distance must be positive");
  if (!(delta_E_orb > 0)) throw std::invalid_argument("material: delta_E_orb must be positive");
  if (!(U_charging > 0)) throw std::invalid_argument("material: U_charging must be positive");
  if (g_factor == 0) throw std::invalid_argument("material: g_factor must be non-zero");
  if (!(t_pulse > 0) || !(rabi_period > 0)) throw std::invalid_argument("material: pulse times must be positive");
  if (!(readout_transfer >= 0) || !(readout_measure >= 0))
    throw std::invalid_argument("material: readout times must be >= 0");
  if (!(termination_ohms > 0)) throw std::invalid_argument("material: termination_ohms must be positive");
  if (std::isnan(noise.T2)) throw std::invalid_argument("material '" + name + "': T2 must be given explicitly");
  noise.validate();
}

MaterialParams inas_preset() { return MaterialParams{}; }

MaterialParams si_preset() {
  MaterialParams m;
  m.name = "si";
  m.g_factor = 2.0;
  m.long_coherence = true;
  m.noise.T2 = std::numeric_limits<double>::quiet_NaN();
  m.noise.T1 = std::numeric_limits<double>::infinity();
  return m;
}

MaterialParams material_preset(std::string_view name) {
  if (name == "inas") return inas_preset();
  if (name == "si") return si_preset();
  throw std::invalid_argument("unknown material preset '" + std::string(name) + "'");
}

Json material_to_json(const MaterialParams& m) {
  Json j;
  j["name"] = m.name;
  j["g_factor"] = m.g_factor;
  j["delta_E_orb"] = m.delta_E_orb;
  j["U_charging"] = m.U_charging;
  j["J_on"] = m.J_on;
  j["J_off"] = m.J_off;
  j["dot_pitch"] = m.dot_pitch;
  j["gate_distance"] = m.gate_distance;
  j["T1"] = m.noise.T1;
  j["T2"] = m.noise.T2;
  j["noise_enabled"] = m.noise.enabled;
  j["t_pulse"] = m.t_pulse;
  j["readout_transfer"] = m.readout_transfer;
  j["readout_measure"] = m.readout_measure;
  j["rabi_period"] = m.rabi_period;
  j["termination_ohms"] = m.termination_ohms;
  j["long_coherence"] = m.long_coherence;
  return j;
}

MaterialParams material_from_json(const Json& j) {
  if (j.is_string()) return material_preset(j.get<std::string>());
  if (!j.is_object()) throw std::invalid_argument("material must be a preset name or an object");
  MaterialParams m = material_preset(j.value("preset", std::string("inas")));
  bool t2_given = false;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const Json& v = it.value();
    auto num = [&]() {
      if (!v.is_number()) throw std::invalid_argument("material field '" + k + "' must be a number");
      return v.get<double>();
    };
    if (k == "preset") continue;
    else if (k == "name") m.name = v.get<std::string>();
    else if (k == "g_factor") m.g_factor = num();
    else if (k == "delta_E_orb") m.delta_E_orb = num();
    else if (k == "U_charging") m.U_charging = num();
    else if (k == "J_on") m.J_on = num();
    else if (k == "J_off") m.J_off = num();
    else if (k == "dot_pitch") m.dot_pitch = num();
    else if (k == "gate_distance") m.gate_distance = num();
    else if (k == "T1") m.noise.T1 = num();
    else if (k == "T2") {
      m.noise.T2 = num();
      t2_given = true;
    } else if (k == "noise_enabled") m.noise.enabled = v.get<bool>();
    else if (k == "t_pulse") m.t_pulse = num();
    else if (k == "readout_transfer") m.readout_transfer = num();
    else if (k == "readout_measure") m.readout_measure = num();
    else if (k == "rabi_period") m.rabi_period = num();
    else if (k == "termination_ohms") m.termination_ohms = num();
    else if (k == "long_coherence") m.long_coherence = v.get<bool>();
    else throw std::invalid_argument("unknown material field '" + k + "'");
  }
  // A T2 override on the InAs preset keeps the 2D-gas relation T1 = 2 T2 unless T1 is given.
  if (t2_given && !j.contains("T1") && m.name == "inas") m.noise.T1 = 2.0 * m.noise.T2;
  return m;
}

}  // namespace qdot
