#include "qdot/pulses.hpp"

#include <cmath>
#include <stdexcept>

#include "qdot/constants.hpp"

namespace qdot {

using namespace constants;

double zeeman_splitting(double g, double B) {
  if (B < 0) throw std::invalid_argument("zeeman_splitting: B must be >= 0");
  return std::abs(g) * bohr_magneton * B;
}

double field_for_splitting(double g, double E) {
  if (g == 0) throw std::invalid_argument("field_for_splitting: g must be non-zero");
  if (E < 0) throw std::invalid_argument("field_for_splitting: E must be >= 0");
  return E / (std::abs(g) * bohr_magneton);
}

double rabi_field(double g, double rabi_period) {
  if (g == 0) throw std::invalid_argument("rabi_field: g must be non-zero");
  if (!(rabi_period > 0)) throw std::invalid_argument("rabi_field: period must be positive");
  return planck / (std::abs(g) * bohr_magneton * rabi_period);
}

double rabi_period_for_field(double g, double B_ac) {
  if (g == 0 || !(B_ac > 0)) throw std::invalid_argument("rabi_period_for_field: need g != 0, B > 0");
  return planck / (std::abs(g) * bohr_magneton * B_ac);
}

double wire_current(double B, double r) {
  if (!(r > 0)) throw std::invalid_argument("wire_current: r must be positive");
  return 2.0 * pi * r * B / mu0;
}

ElectricalDrive drive_electrical(double I, double R) {
  if (!(R > 0)) throw std::invalid_argument("drive_electrical: R must be positive");
  if (I < 0) throw std::invalid_argument("drive_electrical: I must be >= 0");
  const double V = I * R;
  return {V, I * V / std::sqrt(2.0)};
}

MinRabiField min_rabi_field(double g, double T2) {
  if (g == 0) throw std::invalid_argument("min_rabi_field: g must be non-zero");
  if (!(T2 > 0)) throw std::invalid_argument("min_rabi_field: T2 must be positive");
  const double b = hbar / (std::abs(g) * bohr_magneton * T2);
  const double b_gaas = hbar / (0.44 * bohr_magneton * T2);
  return {b, b_gaas / b};
}

double swap_duration(double J) {
  if (!(J > 0)) throw std::invalid_argument("swap_duration: J must be positive");
  return pi * hbar / J;
}

double direct_exchange(double t_G, double U) {
  if (!(U > 0)) throw std::invalid_argument("direct_exchange: U must be positive");
  return t_G * t_G / U;
}

double indirect_exchange(double t_i, double U, double dE_in) {
  if (!(U > 0) || !(dE_in > 0)) throw std::invalid_argument("indirect_exchange: U and dE_in must be positive");
  if (t_i < 0) throw std::invalid_argument("indirect_exchange: t_i must be >= 0");
  const double t2 = t_i * t_i;
  return t2 * t2 / (U * U * dE_in);
}

double tunneling_for_indirect(double J, double U, double dE_in) {
  if (J < 0) throw std::invalid_argument("tunneling_for_indirect: J must be >= 0");
  return std::pow(J * U * U * dE_in, 0.25);
}

DriveReport drive_report(const MaterialParams& m) {
  DriveReport r{};
  r.rabi_period = m.rabi_period;
  r.B_ac = rabi_field(m.g_factor, m.rabi_period);
  r.I_ac = wire_current(r.B_ac, m.gate_distance);
  const auto e = drive_electrical(r.I_ac, m.termination_ohms);
  r.V_ac = e.voltage;
  r.P = e.power;
  return r;
}

ExchangeEstimate exchange_estimate(const MaterialParams& m, double dE_in, std::optional<double> t_G,
                                   std::optional<double> t_i) {
  ExchangeEstimate e{};
  e.dE_in = dE_in;
  e.t_G = t_G.value_or(std::sqrt(m.J_on * m.U_charging));
  e.J_direct = direct_exchange(e.t_G, m.U_charging);
  e.t_i = t_i.value_or(tunneling_for_indirect(e.J_direct, m.U_charging, dE_in));
  e.J_indirect = indirect_exchange(e.t_i, m.U_charging, dE_in);
  e.t_swap = swap_duration(e.J_direct);
  return e;
}

double rabi_rotation_time(const MaterialParams& m, double angle) {
  return std::abs(angle) / (2.0 * pi) * m.rabi_period;
}

double rabi_drive_power(const MaterialParams& m) { return drive_report(m).P; }

double drive_power_ratio(double g, double g_other) {
  if (g == 0 || g_other == 0) throw std::invalid_argument("drive_power_ratio: g must be non-zero");
  return (g * g) / (g_other * g_other);
}

Json to_json(const DriveReport& r) {
  Json j;
  j["B_ac_T"] = r.B_ac;
  j["I_ac_A"] = r.I_ac;
  j["V_ac_V"] = r.V_ac;
  j["P_W"] = r.P;
  j["rabi_period_s"] = r.rabi_period;
  return j;
}

Json to_json(const ExchangeEstimate& e) {
  Json j;
  j["J_direct_eV"] = e.J_direct;
  j["J_indirect_eV"] = e.J_indirect;
  j["t_swap_s"] = e.t_swap;
  j["t_G_eV"] = e.t_G;
  j["t_i_eV"] = e.t_i;
  j["dE_in_eV"] = e.dE_in;
  return j;
}

}  // namespace qdot
