#pragma once

#include <numbers>

namespace xkerr::constants {

inline constexpr double hbar = 1.054571817e-34;  // J*s, CODATA 2018
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Ordinary frequency in Hz to angular frequency in rad/s.
constexpr double angular(double hz) { return two_pi * hz; }
/// Angular frequency in rad/s to ordinary frequency in Hz.
constexpr double ordinary(double rad_per_s) { return rad_per_s / two_pi; }

constexpr double mhz(double v) { return angular(v * 1e6); }
constexpr double ghz(double v) { return angular(v * 1e9); }

}  // namespace xkerr::constants
