#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <utility>
#include <variant>
#include <vector>

#include "wgapdc/errors.hpp"
#include "wgapdc/grid.hpp"
#include "wgapdc/units.hpp"

namespace wgapdc {

using cplx = std::complex<double>;

/// Pump launched into individual channels with complex amplitudes A(n).
struct PerChannelPump {
  std::vector<std::pair<int, cplx>> amplitudes{{0, cplx{1.0, 0.0}}};

  friend bool operator==(const PerChannelPump&, const PerChannelPump&) = default;
};

/// Pump prescribed directly in Bloch space: a rectangular window of width
/// `width` around `center` carrying the phase c0 + c1 k + c2 k^2.
struct KWindowPump {
  double center = 0.0;
  double width = kPi / 2;
  std::array<double, 3> phase{0.0, 0.0, 0.0};

  friend bool operator==(const KWindowPump&, const KWindowPump&) = default;
};

struct PumpSpec {
  double central_wavelength = 774.9e-9;  // m
  /// Intensity FWHM of the pump spectrum in wavelength [m].
  double spectral_fwhm = 0.5e-9 / kTwoPi;
  std::variant<PerChannelPump, KWindowPump> spatial = PerChannelPump{};

  friend bool operator==(const PumpSpec&, const PumpSpec&) = default;

  double central_omega() const { return wavelength_to_omega(central_wavelength); }

  /// Amplitude standard deviation in wavelength: |alpha|^2 halves at +-fwhm/2.
  double sigma_wavelength() const { return spectral_fwhm / (2.0 * std::sqrt(std::log(2.0))); }

  /// The same width expressed in angular frequency (linearised at the centre).
  double sigma_omega() const {
    return kTwoPi * kSpeedOfLight * sigma_wavelength() / (central_wavelength * central_wavelength);
  }

  void validate(int channel_count) const {
    if (!(central_wavelength > 0.0) || !std::isfinite(central_wavelength))
      throw ConfigError("pump: central wavelength must be positive");
    if (!(spectral_fwhm > 0.0) || !std::isfinite(spectral_fwhm)) throw ConfigError("pump: spectral_fwhm must be > 0");
    if (const auto* pc = std::get_if<PerChannelPump>(&spatial)) {
      if (pc->amplitudes.size() > static_cast<std::size_t>(channel_count))
        throw ConfigError("pump: more per-channel amplitudes than channels");
      const int half = channel_count / 2;
      const int hi = channel_count - 1 - half;
      for (const auto& [n, a] : pc->amplitudes) {
        if (n < -half || n > hi) {
          std::ostringstream os;
          os << "pump: channel " << n << " outside [" << -half << ", " << hi << "]";
          throw ConfigError(os.str());
        }
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw ConfigError("pump: non-finite amplitude");
      }
    } else {
      const auto& w = std::get<KWindowPump>(spatial);
      if (!(w.width > 0.0 && w.width <= kTwoPi)) throw ConfigError("pump: k window width must lie in (0, 2 pi]");
      for (double c : w.phase)
        if (!std::isfinite(c)) throw ConfigError("pump: non-finite phase coefficient");
    }
  }
};

/// Spectral pump amplitude alpha(omega_s + omega_i): a real Gaussian in
/// wavelength centred on the pump wavelength, unit at the peak.
inline double pump_spectral_amplitude(double omega_sum, const PumpSpec& pump) {
  const double d = omega_to_wavelength(omega_sum) - pump.central_wavelength;
  const double s = pump.sigma_wavelength();
  return std::exp(-d * d / (2.0 * s * s));
}

/// Unnormalised Bloch amplitude of the pump at an arbitrary momentum; 2 pi periodic.
inline cplx pump_bloch_value(double k, const PumpSpec& pump) {
  if (const auto* pc = std::get_if<PerChannelPump>(&pump.spatial)) {
    cplx acc{0.0, 0.0};
    for (const auto& [n, a] : pc->amplitudes) acc += a * std::polar(1.0, -k * n);
    return acc / kTwoPi;
  }
  const auto& w = std::get<KWindowPump>(pump.spatial);
  const double kz = wrap_to_zone(k);
  const bool inside = w.width >= kTwoPi || std::abs(wrap_to_zone(kz - w.center)) <= 0.5 * w.width + 1e-12;
  if (!inside) return {0.0, 0.0};
  const double phi = w.phase[0] + w.phase[1] * kz + w.phase[2] * kz * kz;
  return std::polar(1.0, phi);
}

/// Bloch distribution sampled on the grid's k axis, scaled to unit power
/// sum |A(k)|^2 dk = 1.
inline std::vector<cplx> pump_bloch_distribution(const PumpSpec& pump, const Grid& grid) {
  pump.validate(grid.channel_count());
  std::vector<cplx> out(grid.nk());
  double power = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = pump_bloch_value(grid.k(j), pump);
    power += std::norm(out[j]);
  }
  const double dk = kTwoPi / grid.channel_count();
  power *= dk;
  if (!(power > 0.0)) throw EmptyStateError("pump: spatial amplitude is zero on every Bloch sample");
  const double scale = 1.0 / std::sqrt(power);
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace wgapdc
