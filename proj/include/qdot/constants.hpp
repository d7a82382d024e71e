#pragma once

#include <numbers>

namespace qdot::constants {

// CODATA values in eV-second units.
inline constexpr double hbar = 6.582119569e-16;  // eV s
inline constexpr double planck = 4.135667696e-15;  // eV s
inline constexpr double bohr_magneton = 5.7883818e-5;  // eV / T
inline constexpr double mu0 = 4.0 * std::numbers::pi * 1e-7;  // T m / A

inline constexpr double pi = std::numbers::pi;

}  // namespace qdot::constants
