#include <gtest/gtest.h>

#include "wgapdc/material.hpp"
#include "wgapdc/pump.hpp"

using namespace wgapdc;

// Reference values: tests/reference/reference_values.py (mpmath, 40 digits).
namespace ref {
constexpr double n_e_1550 = 2.1454796921451922;
constexpr double n_e_1400 = 2.1501159548641431;
constexpr double beta0_1549_8 = 8698208.4177625996;
constexpr double qpm_period = 1.8353521949564924e-5;
constexpr double coupling_1550 = 47.532012427097635;
constexpr double coupling_ratio_1750_1350 = 4.7547386102536262;
constexpr double second_difference = -21.428171357925103;
constexpr double detuned_mismatch = -10.714085678962551;
constexpr double sigma_omega_half_nm = 941968820324.75748;
}  // namespace ref

TEST(Material, IndexMatchesReference) {
  const MaterialModel m;
  EXPECT_NEAR(refractive_index(1550e-9, m), ref::n_e_1550, 1e-13);
  EXPECT_NEAR(refractive_index(1400e-9, m), ref::n_e_1400, 1e-13);
  EXPECT_GT(refractive_index(1400e-9, m), refractive_index(1550e-9, m));
}

TEST(Material, IndexAboveOneAcrossWindow) {
  const MaterialModel m;
  for (double l = 0.45e-6; l <= 4.9e-6; l += 0.05e-6) EXPECT_GT(refractive_index(l, m), 1.0) << l;
}

TEST(Material, OutOfRangeNamesTheValue) {
  MaterialModel m;
  try {
    (void)refractive_index(6e-6, m);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("6e-06"), std::string::npos) << e.what();
  }
  m.temperature_c = 400.0;
  EXPECT_THROW((void)refractive_index(1550e-9, m), DomainError);
}

TEST(Material, Beta0FromPinnedIndex) {
  const MaterialModel m;
  const double l = 1549.8e-9;
  const double b = beta0(wavelength_to_omega(l), m);
  EXPECT_NEAR(b, ref::beta0_1549_8, 1e-7 * 1e-2);
  EXPECT_NEAR(b, kTwoPi * refractive_index(l, m) / l, 1e-6);
}

TEST(Material, CouplingReference) {
  const MaterialModel m;
  EXPECT_NEAR(coupling(1550e-9, m), ref::coupling_1550, 1e-11);
  EXPECT_NEAR(coupling(1750e-9, m) / coupling(1350e-9, m), ref::coupling_ratio_1750_1350, 1e-12);
  EXPECT_EQ(coupling(1549.8e-9, m), coupling(1549.8e-9, m));
  MaterialModel c = m;
  c.constant_coupling = 400.0;
  EXPECT_EQ(coupling(1400e-9, c), 400.0);
  EXPECT_THROW((void)coupling(10e-6, c), DomainError);
}

TEST(Material, CouplingIncreasesWithWavelength) {
  const MaterialModel m;
  double prev = 0.0;
  for (double l = 1300e-9; l <= 1800e-9; l += 10e-9) {
    const double c = coupling(l, m);
    EXPECT_GT(c, prev);
    prev = c;
  }
}

TEST(Material, MismatchSymmetricAndZeroAtFittedPair) {
  const MaterialModel m;
  const double ws = wavelength_to_omega(1549.8e-9);
  EXPECT_NEAR(delta_beta_omega(ws, ws, m), 0.0, 1e-6);
  for (double d : {1e12, 5e12, 2e13}) EXPECT_EQ(delta_beta_omega(ws + d, ws - d, m), delta_beta_omega(ws - d, ws + d, m));
}

TEST(Material, SecondDifferencePinned) {
  const MaterialModel m;
  const double ws = wavelength_to_omega(1549.8e-9);
  const double d = 1e13;
  const double plus = delta_beta_omega(ws + d, ws - d, m);
  const double minus = delta_beta_omega(ws - d, ws + d, m);
  const double mid = delta_beta_omega(ws, ws, m);
  EXPECT_NEAR(plus, ref::detuned_mismatch, 1e-6);
  EXPECT_NEAR(plus + minus - 2 * mid, ref::second_difference, 2e-6);
}

TEST(Material, FitQpmPeriod) {
  const MaterialModel m;
  const double p = fit_qpm_period({1549.8e-9, 1549.8e-9}, 774.9e-9, m);
  EXPECT_GT(p, 0.0);
  EXPECT_NEAR(p, ref::qpm_period, 1e-18);
  MaterialModel f = m;
  f.qpm_period = p;
  const double w = wavelength_to_omega(1549.8e-9);
  EXPECT_LT(std::abs(delta_beta_omega(w, w, f)), kQpmFitTolerance);
}

TEST(Material, FitRejectsEnergyViolation) {
  EXPECT_THROW((void)fit_qpm_period({1500e-9, 1600e-9}, 774.9e-9, MaterialModel{}), PreconditionError);
}

TEST(Material, FitRejectsUnreachableTarget) {
  // dispersionless medium: no grating period can be positive
  MaterialModel m;
  m.sellmeier = SellmeierCoefficients{{4.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}};
  EXPECT_THROW((void)fit_qpm_period({1549.8e-9, 1549.8e-9}, 774.9e-9, m), FitError);
}

TEST(Pump, SigmaOmegaPinned) {
  PumpSpec p;
  p.central_wavelength = 774.9e-9;
  p.spectral_fwhm = 0.5e-9;
  EXPECT_NEAR(p.sigma_omega() / ref::sigma_omega_half_nm, 1.0, 1e-12);
}

TEST(Pump, GaussianPeakAndHalfIntensity) {
  PumpSpec p;
  p.spectral_fwhm = 0.5e-9;
  const double wp = p.central_omega();
  EXPECT_EQ(pump_spectral_amplitude(wp, p), 1.0);
  for (double d : {-1e10, 1e10, 3e11}) EXPECT_LT(pump_spectral_amplitude(wp + d, p), 1.0);
  for (double s : {-0.5, 0.5}) {
    const double w = wavelength_to_omega(p.central_wavelength + s * p.spectral_fwhm);
    EXPECT_NEAR(pump_spectral_amplitude(w, p), 1.0 / std::sqrt(2.0), 1e-6);
  }
}

TEST(Pump, SingleChannelIsFlatInK) {
  const Grid g = Grid::from_wavelengths(1500e-9, 1600e-9, 3, 11);
  PumpSpec p;
  const auto a = pump_bloch_distribution(p, g);
  for (const auto& v : a) EXPECT_NEAR(std::abs(v), std::abs(a[0]), 1e-15);
  p.spatial = PerChannelPump{{{3, cplx{1.0, 0.0}}}};
  const auto b = pump_bloch_distribution(p, g);
  for (std::size_t j = 0; j < b.size(); ++j) {
    EXPECT_NEAR(std::abs(b[j]), std::abs(a[0]), 1e-15);
    EXPECT_NEAR(std::abs(b[j] - std::abs(a[0]) * std::polar(1.0, -3.0 * g.k(j))), 0.0, 1e-14);
  }
}

TEST(Pump, KWindowIsRectangularWithZeroPhase) {
  const Grid g = Grid::from_wavelengths(1500e-9, 1600e-9, 3, 41);
  PumpSpec p;
  p.spatial = KWindowPump{};
  const auto a = pump_bloch_distribution(p, g);
  double on = -1.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (std::abs(g.k(j)) <= kPi / 4 + 1e-12) {
      if (on < 0) on = a[j].real();
      EXPECT_NEAR(a[j].real(), on, 1e-15);
      EXPECT_EQ(a[j].imag(), 0.0);
    } else {
      EXPECT_EQ(a[j], cplx{});
    }
  }
}

TEST(Pump, EmptyPumpRejected) {
  const Grid g = Grid::from_wavelengths(1500e-9, 1600e-9, 3, 5);
  PumpSpec p;
  p.spatial = PerChannelPump{{{0, cplx{0.0, 0.0}}}};
  EXPECT_THROW((void)pump_bloch_distribution(p, g), EmptyStateError);
  p.spatial = PerChannelPump{{{7, cplx{1.0, 0.0}}}};
  EXPECT_THROW((void)pump_bloch_distribution(p, g), ConfigError);
}
