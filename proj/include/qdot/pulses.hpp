#pragma once

// Closed-form drive and exchange calculators. Energies in eV, fields in T,
// currents in A, times in s.

#include "qdot/json_io.hpp"
#include "qdot/material.hpp"

namespace qdot {

/// |g| mu_B B.
double zeeman_splitting(double g, double B);

/// Static field giving Zeeman splitting `E`: E / (|g| mu_B).
double field_for_splitting(double g, double E);

/// B_ac = h / (|g| mu_B T_Rabi).
double rabi_field(double g, double rabi_period);

/// Rabi period implied by a drive field (inverse of rabi_field).
double rabi_period_for_field(double g, double B_ac);

/// Current in a straight wire producing `B` at distance `r`: I = 2 pi r B / mu0.
double wire_current(double B, double r);

struct ElectricalDrive {
  double voltage;  // V, peak
  double power;  // W, I_peak V_peak / sqrt(2)
};

ElectricalDrive drive_electrical(double I, double R);

struct MinRabiField {
  double B_min;  // T, hbar / (|g| mu_B T2)
  double ratio_vs_gaas;  // B_min(g = 0.44) / B_min(g), same T2
};

MinRabiField min_rabi_field(double g, double T2);

/// t = pi hbar / J.
double swap_duration(double J);

/// t_G^2 / U.
double direct_exchange(double t_G, double U);

/// t_i^4 / (U^2 dE_in).
double indirect_exchange(double t_i, double U, double dE_in);

/// Intermediary tunneling amplitude making indirect_exchange equal `J`.
double tunneling_for_indirect(double J, double U, double dE_in);

struct DriveReport {
  double B_ac;
  double I_ac;
  double V_ac;
  double P;
  double rabi_period;
};

struct ExchangeEstimate {
  double J_direct;
  double J_indirect;
  double t_swap;
  double t_G;  // inputs echoed
  double t_i;
  double dE_in;
};

DriveReport drive_report(const MaterialParams& m);

/// Defaults: t_G chosen so that J_direct = J_on, and t_i so that the indirect
/// route matches it at dE_in = 0.1 meV.
ExchangeEstimate exchange_estimate(const MaterialParams& m, double dE_in = 1e-4,
                                   std::optional<double> t_G = std::nullopt,
                                   std::optional<double> t_i = std::nullopt);

/// Duration of a single-qubit Rabi rotation by `angle`.
double rabi_rotation_time(const MaterialParams& m, double angle);

/// Drive power while a Rabi pulse is on (P of drive_report).
double rabi_drive_power(const MaterialParams& m);

/// P(g_other) / P(g) at equal Rabi period and geometry, i.e. (g/g_other)^2.
double drive_power_ratio(double g, double g_other);

Json to_json(const DriveReport& r);
Json to_json(const ExchangeEstimate& e);

}  // namespace qdot
