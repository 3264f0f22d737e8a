#pragma once

#include <numbers>

// All frequencies and rates are angular frequencies in rad/s, hbar = 1.
// Lengths are measured in 1/k (k the optical wavevector), momenta in hbar*k.
//
// Bare "kHz" values quoted for trap depths and the recoil energy are read as
// 10^3 rad/s. With that reading the optical design point gives V0 = 1.02e4
// rad/s and tau_eff = 0.176 ms consistently; see README.
namespace vactrap::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double rad_per_s(double v) { return v; }
constexpr double krad_per_s(double v) { return v * 1e3; }
constexpr double two_pi_hz(double v) { return v * two_pi; }
constexpr double two_pi_khz(double v) { return v * two_pi * 1e3; }
constexpr double two_pi_mhz(double v) { return v * two_pi * 1e6; }

constexpr double to_two_pi_mhz(double rad_s) { return rad_s / (two_pi * 1e6); }
constexpr double to_two_pi_khz(double rad_s) { return rad_s / (two_pi * 1e3); }
constexpr double to_two_pi_hz(double rad_s) { return rad_s / two_pi; }

} // namespace vactrap::units
