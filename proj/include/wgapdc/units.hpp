#pragma once

#include <cmath>
#include <numbers>

namespace wgapdc {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kNanometre = 1e-9;

/// Vacuum wavelength [m] <-> angular frequency [rad/s].
constexpr double wavelength_to_omega(double wavelength) { return kTwoPi * kSpeedOfLight / wavelength; }
constexpr double omega_to_wavelength(double omega) { return kTwoPi * kSpeedOfLight / omega; }

/// Wraps a transverse momentum into the first Brillouin zone (-pi, pi].
inline double wrap_to_zone(double k) {
  double r = std::remainder(k, kTwoPi);  // in [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

}  // namespace wgapdc
