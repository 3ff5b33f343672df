#pragma once

#include <numbers>

// SI 2019 exact values.
namespace sawcomb::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double h = 6.62607015e-34;
inline constexpr double hbar = h / two_pi;
inline constexpr double k_b = 1.380649e-23;
inline constexpr double e_charge = 1.602176634e-19;
inline constexpr double flux_quantum = h / (2.0 * e_charge);

inline constexpr double to_angular(double f_hz) { return two_pi * f_hz; }
inline constexpr double to_hz(double omega) { return omega / two_pi; }

}  // namespace sawcomb::constants
