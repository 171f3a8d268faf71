#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "wgapdc/errors.hpp"
#include "wgapdc/units.hpp"

namespace wgapdc {

/// Coefficients of the temperature-dependent extraordinary Sellmeier form
///
///   n_e^2 = a1 + b1 F + (a2 + b2 F) / (L^2 - (a3 + b3 F)^2)
///         + (a4 + b4 F) / (L^2 - a5^2) - a6 L^2,
///   F = (T - 24.5)(T + 570.82),  L in micrometres, T in degrees Celsius.
struct SellmeierCoefficients {
  std::array<double, 6> a{};
  std::array<double, 4> b{};

  friend bool operator==(const SellmeierCoefficients&, const SellmeierCoefficients&) = default;
};

/// Congruent lithium niobate, extraordinary axis: D. H. Jundt,
/// "Temperature-dependent Sellmeier equation for the index of refraction,
/// n_e, in congruent lithium niobate", Opt. Lett. 22, 1553 (1997).
inline SellmeierCoefficients jundt_congruent_ne() {
  return {{5.35583, 0.100473, 0.20692, 100.0, 11.34927, 1.5334e-2},
          {4.629e-7, 3.862e-8, -0.89e-8, 2.657e-5}};
}

struct ValidityWindow {
  double wavelength_min = 0.4e-6;  // m
  double wavelength_max = 5.0e-6;  // m
  double temperature_min = 20.0;   // degC
  double temperature_max = 300.0;  // degC

  friend bool operator==(const ValidityWindow&, const ValidityWindow&) = default;
};

/// Dispersion, effective grating and coupling model of the array material.
struct MaterialModel {
  SellmeierCoefficients sellmeier = jundt_congruent_ne();
  double temperature_c = 185.0;
  /// Effective QPM grating period Lambda_eff [m].
  double qpm_period = 1.8353521949564924e-5;
  /// Dimensionless prefactor of C(lambda) = scale / lambda * exp(-damping n(lambda) / lambda).
  double coupling_scale = 6.5e-2;
  /// gamma_0 [m].
  double damping = 4.9e-6;
  /// When set, C(lambda) is this constant [1/m] at every wavelength.
  std::optional<double> constant_coupling;
  /// Constant modal correction added to the bulk index inside beta0 (n_eff = n_e + offset).
  double index_offset = 0.0;
  ValidityWindow validity;

  friend bool operator==(const MaterialModel&, const MaterialModel&) = default;

  void validate() const {
    if (!(temperature_c >= validity.temperature_min && temperature_c <= validity.temperature_max)) {
      std::ostringstream os;
      os << "temperature " << temperature_c << " degC outside validity window [" << validity.temperature_min
         << ", " << validity.temperature_max << "]";
      throw DomainError(os.str());
    }
    if (!(qpm_period > 0.0) || !std::isfinite(qpm_period)) throw ConfigError("qpm_period must be > 0");
    if (!(coupling_scale >= 0.0)) throw ConfigError("coupling_scale must be >= 0");
    if (!(damping >= 0.0)) throw ConfigError("damping must be >= 0");
    if (constant_coupling && !(*constant_coupling >= 0.0)) throw ConfigError("constant coupling must be >= 0");
    if (!std::isfinite(index_offset)) throw ConfigError("index_offset must be finite");
  }
};

/// Temperature-corrected extraordinary index n_e(lambda, T).
inline double refractive_index(double wavelength, const MaterialModel& model) {
  const auto& w = model.validity;
  if (!(wavelength >= w.wavelength_min && wavelength <= w.wavelength_max)) {
    std::ostringstream os;
    os << "wavelength " << wavelength << " m outside validity window [" << w.wavelength_min << ", "
       << w.wavelength_max << "]";
    throw DomainError(os.str());
  }
  const double t = model.temperature_c;
  if (!(t >= w.temperature_min && t <= w.temperature_max)) {
    std::ostringstream os;
    os << "temperature " << t << " degC outside validity window [" << w.temperature_min << ", "
       << w.temperature_max << "]";
    throw DomainError(os.str());
  }
  const auto& [a, b] = model.sellmeier;
  const double f = (t - 24.5) * (t + 570.82);
  const double l2 = std::pow(wavelength * 1e6, 2);
  const double pole = a[2] + b[2] * f;
  const double n2 = a[0] + b[0] * f + (a[1] + b[1] * f) / (l2 - pole * pole) + (a[3] + b[3] * f) / (l2 - a[4] * a[4]) -
                    a[5] * l2;
  if (!(n2 > 1.0) || !std::isfinite(n2)) {
    std::ostringstream os;
    os << "Sellmeier evaluation at " << wavelength << " m gave n^2 = " << n2;
    throw DomainError(os.str());
  }
  return std::sqrt(n2);
}

/// Single-waveguide propagation constant beta0(omega) = n_eff(omega) omega / c [rad/m].
inline double beta0(double omega, const MaterialModel& model) {
  const double n = refractive_index(omega_to_wavelength(omega), model) + model.index_offset;
  return n * omega / kSpeedOfLight;
}

/// Nearest-neighbour coupling C(lambda) [1/m].
inline double coupling(double wavelength, const MaterialModel& model) {
  if (model.constant_coupling) {
    // still enforce the validity window so constant-C runs fail the same way
    (void)refractive_index(wavelength, model);
    return *model.constant_coupling;
  }
  const double n = refractive_index(wavelength, model);
  return model.coupling_scale / wavelength * std::exp(-model.damping * n / wavelength);
}

inline double coupling_at_omega(double omega, const MaterialModel& model) {
  return coupling(omega_to_wavelength(omega), model);
}

/// Spectral phase mismatch of a single waveguide including the QPM grating term [1/m].
inline double delta_beta_omega(double omega_s, double omega_i, const MaterialModel& model) {
  return beta0(omega_s + omega_i, model) - (beta0(omega_s, model) + beta0(omega_i, model)) -
         kTwoPi / model.qpm_period;
}

/// Residual tolerance [rad/m] a fitted grating period must meet at its target pair.
inline constexpr double kQpmFitTolerance = 1e-6;

/// Effective grating period that phase matches the given (signal, idler)
/// wavelength pair for a single isolated waveguide. The mismatch is affine in
/// 2 pi / Lambda, so the root is found by direct inversion and then verified.
inline double fit_qpm_period(std::pair<double, double> target_pair, double pump_wavelength,
                             const MaterialModel& model) {
  const auto [ls, li] = target_pair;
  if (!(ls > 0.0 && li > 0.0 && pump_wavelength > 0.0))
    throw PreconditionError("fit_qpm_period: wavelengths must be positive");
  const double inv_sum = 1.0 / ls + 1.0 / li;
  const double rel = std::abs(1.0 / pump_wavelength - inv_sum) * pump_wavelength;
  if (rel > 1e-6) {
    std::ostringstream os;
    os << "fit_qpm_period: target pair (" << ls << ", " << li << ") violates energy conservation with pump "
       << pump_wavelength << " (relative mismatch " << rel << ")";
    throw PreconditionError(os.str());
  }
  const double ws = wavelength_to_omega(ls);
  const double wi = wavelength_to_omega(li);
  const double mismatch = beta0(ws + wi, model) - (beta0(ws, model) + beta0(wi, model));
  if (!(mismatch > 0.0) || !std::isfinite(mismatch)) {
    std::ostringstream os;
    os << "fit_qpm_period: no positive grating period phase matches the target; residual without grating = "
       << mismatch << " rad/m";
    throw FitError(os.str());
  }
  MaterialModel fitted = model;
  fitted.qpm_period = kTwoPi / mismatch;
  const double residual = delta_beta_omega(ws, wi, fitted);
  if (std::abs(residual) >= kQpmFitTolerance) {
    std::ostringstream os;
    os << "fit_qpm_period: residual " << residual << " rad/m exceeds tolerance";
    throw FitError(os.str());
  }
  return fitted.qpm_period;
}

}  // namespace wgapdc
