#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "wgapdc/config.hpp"
#include "wgapdc/correlations.hpp"
#include "wgapdc/jsa.hpp"

namespace wgapdc {

/// Resolved physical inputs of one run.
struct Pipeline {
  Grid grid;
  ArrayGeometry geometry;
  PumpSpec pump;
  MaterialModel model;
  std::optional<SpectralFilter> filter;
  double band_sigmas = 6.0;

  static Pipeline from_config(const RunConfig& c) {
    c.validate();
    return {c.grid(), c.geometry(), c.pump(), c.material(), c.spectral_filter(), c.grid_band_sigmas};
  }

  BandedJsa source() const { return BandedJsa(grid, geometry, pump, model, filter, band_sigmas); }

  Pipeline with_pump_wavelength(double lambda_p) const {
    Pipeline p = *this;
    p.pump.central_wavelength = lambda_p;
    return p;
  }
};

/// Pump wavelength for which the single-waveguide mismatch at the degenerate
/// point, delta_beta_omega(omega_p / 2, omega_p / 2), equals `target` [1/m].
inline double tune_pump_for_mismatch(const MaterialModel& model, double target, double lambda_guess,
                                     double half_range = 5e-9) {
  auto f = [&](double lp) {
    const double w = 0.5 * wavelength_to_omega(lp);
    return delta_beta_omega(w, w, model) - target;
  };
  double lo = lambda_guess - half_range, hi = lambda_guess + half_range;
  if (f(lo) * f(hi) > 0.0) {
    std::ostringstream os;
    os << "no pump wavelength within +-" << half_range << " m of " << lambda_guess << " reaches mismatch " << target;
    throw FitError(os.str());
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, [](double a, double b) { return std::abs(a - b) < 1e-20; }, iters);
  return 0.5 * (r.first + r.second);
}

/// Spectral branches of the central-channel marginal for each pump wavelength.
inline std::vector<BranchPeaks> phase_matching_curve(const std::vector<double>& pump_wavelengths, const Pipeline& base) {
  std::vector<BranchPeaks> out;
  out.reserve(pump_wavelengths.size());
  for (double lp : pump_wavelengths) {
    const Pipeline p = base.with_pump_wavelength(lp);
    try {
      const auto map = spatio_spectral_intensity(p.source());
      const auto marginal = spectral_marginal(map, 0);
      out.push_back(find_branches(map.wavelength, marginal, lp));
    } catch (const EmptyStateError&) {
      BranchPeaks missing;
      missing.pump_wavelength = lp;
      out.push_back(missing);
    }
  }
  return out;
}

/// Relative energy-conservation residual |1/ls + 1/li - 1/lp| * lp.
inline double energy_residual(const BranchPeaks& b) {
  if (!b.lambda_s || !b.lambda_i) return std::numeric_limits<double>::infinity();
  return std::abs(1.0 / *b.lambda_s + 1.0 / *b.lambda_i - 1.0 / b.pump_wavelength) * b.pump_wavelength;
}

// ---- map metrics ------------------------------------------------------------

/// m shifted circularly by (s, s) along both channel axes.
inline Array2<double> circular_shift(const Array2<double>& m, int s) {
  const auto n = static_cast<int>(m.rows());
  Array2<double> out(m.rows(), m.cols());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(((r + s) % n + n) % n, ((c + s) % n + n) % n) = m(r, c);
  return out;
}

inline std::pair<std::size_t, std::size_t> argmax(const Array2<double>& m) {
  const auto it = std::max_element(m.data().begin(), m.data().end());
  const auto j = static_cast<std::size_t>(it - m.data().begin());
  return {j / m.cols(), j % m.cols()};
}

/// Circular mean channel offset of a ring map (both axes share the label set).
inline double mean_diagonal_offset(const Array2<double>& m) {
  const auto n = static_cast<double>(m.rows());
  cplx acc{};
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      acc += m(r, c) * std::polar(1.0, kTwoPi * (static_cast<double>(r) + static_cast<double>(c)) / (2.0 * n));
  return std::arg(acc) * 2.0 * n / kTwoPi;
}

/// Second moment of the map along u = (n_s + n_i) / sqrt(2) about its mean.
inline double diagonal_second_moment(const Array2<double>& m, const std::vector<int>& labels) {
  double w = 0.0, mu = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double u = (labels[r] + labels[c]) / std::sqrt(2.0);
      w += m(r, c);
      mu += m(r, c) * u;
    }
  mu /= w;
  double var = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double u = (labels[r] + labels[c]) / std::sqrt(2.0) - mu;
      var += m(r, c) * u * u;
    }
  return var / w;
}

/// Fraction of the map within `width` of the anti-diagonal n_s = -n_i and of the diagonal n_s = n_i.
inline std::pair<double, double> diagonal_fractions(const Array2<double>& m, const std::vector<int>& labels, int width) {
  double total = 0.0, anti = 0.0, diag = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      total += m(r, c);
      if (std::abs(labels[r] + labels[c]) <= width) anti += m(r, c);
      if (std::abs(labels[r] - labels[c]) <= width) diag += m(r, c);
    }
  return {anti / total, diag / total};
}

/// Checks that every local maximum of `gamma_k` reaching `fraction` of the
/// global maximum lies within one grid cell of the contour
/// cos(k_s) + cos(k_i) = rhs (the contour function changes sign or vanishes
/// in the periodic 3 x 3 neighbourhood). Returns (maxima found, maxima on contour).
inline std::pair<int, int> contour_agreement(const Array2<double>& gamma_k, const Grid& grid, double rhs,
                                             double fraction = 0.5) {
  const auto n = static_cast<int>(grid.nk());
  const double top = *std::max_element(gamma_k.data().begin(), gamma_k.data().end());
  auto at = [&](int a, int b) { return gamma_k(((a % n) + n) % n, ((b % n) + n) % n); };
  auto g = [&](int a, int b) {
    return std::cos(grid.k(((a % n) + n) % n)) + std::cos(grid.k(((b % n) + n) % n)) - rhs;
  };
  int found = 0, on = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double v = gamma_k(a, b);
      if (v < fraction * top) continue;
      bool is_max = true;
      for (int da = -1; da <= 1 && is_max; ++da)
        for (int db = -1; db <= 1; ++db)
          if ((da || db) && at(a + da, b + db) > v) {
            is_max = false;
            break;
          }
      if (!is_max) continue;
      ++found;
      double lo = g(a, b), hi = g(a, b);
      for (int da = -1; da <= 1; ++da)
        for (int db = -1; db <= 1; ++db) {
          lo = std::min(lo, g(a + da, b + db));
          hi = std::max(hi, g(a + da, b + db));
        }
      if (lo <= 0.0 && hi >= 0.0) ++on;
    }
  return {found, on};
}

}  // namespace wgapdc
