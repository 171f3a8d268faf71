#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "wgapdc/errors.hpp"
#include "wgapdc/grid.hpp"
#include "wgapdc/material.hpp"
#include "wgapdc/parallel.hpp"
#include "wgapdc/pump.hpp"
#include "wgapdc/units.hpp"

namespace wgapdc {

struct ArrayGeometry {
  double length = 0.04;  // m
  int channel_count = 41;
  double temperature_c = 185.0;  // mirrors MaterialModel::temperature_c

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;

  void validate() const {
    if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("geometry: length must be > 0");
    if (channel_count < 3) throw ConfigError("geometry: channel_count must be >= 3");
  }
};

/// Phase mismatch contributed by the array dispersion [1/m].
inline double delta_beta_A(double ks, double ki, double omega_s, double omega_i, const MaterialModel& model) {
  const double ts = -2.0 * coupling_at_omega(omega_s, model) * std::cos(ks);
  const double ti = -2.0 * coupling_at_omega(omega_i, model) * std::cos(ki);
  return ts + ti;
}

/// sinc(L dbeta / 2) exp(-i dbeta L / 2), i.e. (1/L) * integral_{-L}^{0} exp(i dbeta z) dz.
inline cplx phase_match_factor(double delta_beta, double length) {
  const double x = 0.5 * length * delta_beta;
  double s;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    s = 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  } else {
    s = std::sin(x) / x;
  }
  return s * std::polar(1.0, -x);
}

/// Rectangular pass band on each photon's angular frequency [rad/s].
struct SpectralFilter {
  double signal_min = 0.0;
  double signal_max = 0.0;
  double idler_min = 0.0;
  double idler_max = 0.0;

  friend bool operator==(const SpectralFilter&, const SpectralFilter&) = default;

  static SpectralFilter from_wavelengths(double signal_lambda_min, double signal_lambda_max, double idler_lambda_min,
                                         double idler_lambda_max) {
    return {wavelength_to_omega(signal_lambda_max), wavelength_to_omega(signal_lambda_min),
            wavelength_to_omega(idler_lambda_max), wavelength_to_omega(idler_lambda_min)};
  }

  void validate() const {
    if (!(signal_min <= signal_max && idler_min <= idler_max)) throw PreconditionError("filter: bounds not ordered");
  }

  bool passes(double ws, double wi) const {
    return ws >= signal_min && ws <= signal_max && wi >= idler_min && wi <= idler_max;
  }
};

/// Evaluates f(omega_s, omega_i, k_s, k_i) one (omega_s, omega_i) slice at a
/// time. Per-frequency material quantities are cached so a slice costs N^2
/// phase-matching evaluations.
class JsaEvaluator {
 public:
  JsaEvaluator(const Grid& grid, const ArrayGeometry& geometry, const PumpSpec& pump, const MaterialModel& model)
      : grid_(grid), geometry_(geometry), pump_(pump), model_(model) {
    geometry_.validate();
    model_.validate();
    if (grid_.channel_count() != geometry_.channel_count) {
      std::ostringstream os;
      os << "grid has " << grid_.channel_count() << " momentum samples but the array has "
         << geometry_.channel_count << " channels";
      throw ConfigError(os.str());
    }
    if (geometry_.temperature_c != model_.temperature_c)
      throw ConfigError("geometry and material temperatures differ");
    bloch_ = pump_bloch_distribution(pump_, grid_);
    const auto& ws = grid_.omega_s();
    const auto& wi = grid_.omega_i();
    beta_s_.resize(ws.count);
    c_s_.resize(ws.count);
    for (std::size_t i = 0; i < ws.count; ++i) {
      beta_s_[i] = beta0(ws[i], model_);
      c_s_[i] = coupling_at_omega(ws[i], model_);
    }
    beta_i_.resize(wi.count);
    c_i_.resize(wi.count);
    for (std::size_t i = 0; i < wi.count; ++i) {
      beta_i_[i] = beta0(wi[i], model_);
      c_i_[i] = coupling_at_omega(wi[i], model_);
    }
    cos_k_.resize(grid_.nk());
    for (std::size_t j = 0; j < grid_.nk(); ++j) cos_k_[j] = std::cos(grid_.k(j));
    grating_ = kTwoPi / model_.qpm_period;
  }

  const Grid& grid() const { return grid_; }
  const ArrayGeometry& geometry() const { return geometry_; }
  const PumpSpec& pump() const { return pump_; }
  const MaterialModel& model() const { return model_; }
  std::span<const cplx> bloch() const { return bloch_; }

  double delta_beta_omega_at(std::size_t is, std::size_t ii) const {
    const double sum = grid_.omega_s()[is] + grid_.omega_i()[ii];
    return beta0(sum, model_) - (beta_s_[is] + beta_i_[ii]) - grating_;
  }

  /// Writes the N x N slice (row = k_s index, column = k_i index) into `out`.
  void fill_slice(std::size_t is, std::size_t ii, std::span<cplx> out) const {
    const std::size_t n = grid_.nk();
    const double alpha = pump_spectral_amplitude(grid_.omega_s()[is] + grid_.omega_i()[ii], pump_);
    if (alpha == 0.0) {
      std::fill(out.begin(), out.end(), cplx{});
      return;
    }
    const double dbw = delta_beta_omega_at(is, ii);
    const double cs = -2.0 * c_s_[is];
    const double ci = -2.0 * c_i_[ii];
    const double len = geometry_.length;
    for (std::size_t a = 0; a < n; ++a) {
      const double ta = cs * cos_k_[a];
      for (std::size_t b = 0; b < n; ++b) {
        const double tb = ci * cos_k_[b];
        const cplx pm = phase_match_factor(dbw + (ta + tb), len);
        out[a * n + b] = alpha * bloch_[grid_.sum_index(a, b)] * pm;
      }
    }
  }

 private:
  Grid grid_;
  ArrayGeometry geometry_;
  PumpSpec pump_;
  MaterialModel model_;
  std::vector<cplx> bloch_;
  std::vector<double> beta_s_, beta_i_, c_s_, c_i_, cos_k_;
  double grating_ = 0.0;
};

namespace detail {

/// Compensated (Neumaier) running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace detail

/// Dense complex amplitude f[i_ws, i_wi, i_ks, i_ki] on a Grid, row-major.
class JsaTensor {
 public:
  JsaTensor() = default;
  explicit JsaTensor(Grid grid)
      : grid_(std::move(grid)),
        values_(grid_.omega_s().count * grid_.omega_i().count * grid_.nk() * grid_.nk()) {}

  const Grid& grid() const { return grid_; }
  bool is_normalized() const { return normalized_; }
  void set_normalized(bool v) { normalized_ = v; }

  std::size_t slice_size() const { return grid_.nk() * grid_.nk(); }
  std::size_t slice_offset(std::size_t is, std::size_t ii) const {
    return (is * grid_.omega_i().count + ii) * slice_size();
  }
  std::span<cplx> slice(std::size_t is, std::size_t ii) { return {values_.data() + slice_offset(is, ii), slice_size()}; }
  std::span<const cplx> slice(std::size_t is, std::size_t ii) const {
    return {values_.data() + slice_offset(is, ii), slice_size()};
  }

  cplx& at(std::size_t is, std::size_t ii, std::size_t a, std::size_t b) {
    return values_[slice_offset(is, ii) + a * grid_.nk() + b];
  }
  const cplx& at(std::size_t is, std::size_t ii, std::size_t a, std::size_t b) const {
    return values_[slice_offset(is, ii) + a * grid_.nk() + b];
  }

  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }

  std::size_t rows() const { return grid_.omega_s().count; }

  template <class Fn>
  void for_each_slice_in_rows(std::size_t row_begin, std::size_t row_end, Fn&& fn) const {
    for (std::size_t is = row_begin; is < row_end; ++is)
      for (std::size_t ii = 0; ii < grid_.omega_i().count; ++ii) fn(is, ii, slice(is, ii));
  }

  template <class Fn>
  void for_each_slice(Fn&& fn) const {
    for_each_slice_in_rows(0, rows(), fn);
  }

  /// sum |f|^2 * cell measure.
  double power() const {
    detail::CompensatedSum acc;
    for (const auto& v : values_) acc.add(std::norm(v));
    return acc.value() * grid_.cell_measure();
  }

 private:
  Grid grid_;
  std::vector<cplx> values_;
  bool normalized_ = false;
};

/// Anything that can stream (omega_s, omega_i) slices of an amplitude.
template <class S>
concept SliceSource = requires(const S& s) {
  { s.grid() } -> std::convertible_to<const Grid&>;
  { s.is_normalized() } -> std::convertible_to<bool>;
  { s.rows() } -> std::convertible_to<std::size_t>;
  s.for_each_slice([](std::size_t, std::size_t, std::span<const cplx>) {});
  s.for_each_slice_in_rows(std::size_t{}, std::size_t{}, [](std::size_t, std::size_t, std::span<const cplx>) {});
};

/// Signal rows handed to one worker by the parallel reductions.
inline constexpr std::size_t kRowChunk = 8;

/// Upper bound on dense tensor entries (about 1 GB of complex doubles).
inline constexpr std::size_t kMaxDenseEntries = 64u * 1024u * 1024u;

inline JsaTensor build_jsa(const Grid& grid, const ArrayGeometry& geometry, const PumpSpec& pump,
                           const MaterialModel& model) {
  const JsaEvaluator eval(grid, geometry, pump, model);
  const std::size_t entries = grid.omega_s().count * grid.omega_i().count * grid.nk() * grid.nk();
  if (entries > kMaxDenseEntries) {
    std::ostringstream os;
    os << "dense tensor of " << entries << " entries exceeds the " << kMaxDenseEntries
       << " entry limit; use the banded streaming source";
    throw ConfigError(os.str());
  }
  JsaTensor out(grid);
  for (std::size_t is = 0; is < grid.omega_s().count; ++is)
    for (std::size_t ii = 0; ii < grid.omega_i().count; ++ii) eval.fill_slice(is, ii, out.slice(is, ii));
  return out;
}

inline JsaTensor normalize(JsaTensor jsa) {
  const double p = jsa.power();
  if (!(p > 0.0) || !std::isfinite(p)) throw EmptyStateError("normalize: tensor has zero total power");
  if (jsa.is_normalized() && std::abs(p - 1.0) < 1e-12) return jsa;
  const double scale = 1.0 / std::sqrt(p);
  for (auto& v : jsa.values()) v *= scale;
  jsa.set_normalized(true);
  return jsa;
}

inline JsaTensor apply_spectral_filter(JsaTensor jsa, const SpectralFilter& filter) {
  filter.validate();
  const auto& g = jsa.grid();
  bool any = false;
  for (std::size_t is = 0; is < g.omega_s().count; ++is) {
    for (std::size_t ii = 0; ii < g.omega_i().count; ++ii) {
      if (filter.passes(g.omega_s()[is], g.omega_i()[ii])) {
        any = true;
        continue;
      }
      auto s = jsa.slice(is, ii);
      std::fill(s.begin(), s.end(), cplx{});
    }
  }
  if (!any) throw EmptyStateError("filter excludes every grid point");
  jsa.set_normalized(false);
  return normalize(std::move(jsa));
}

/// Streaming source for fine spectral grids: evaluates slices on demand and
/// only inside the band |omega_s + omega_i - omega_p| <= band_sigmas * sigma_omega
/// (outside it the pump amplitude is below exp(-band_sigmas^2 / 2)). The
/// normalisation constant is computed once at construction.
class BandedJsa {
 public:
  BandedJsa(const Grid& grid, const ArrayGeometry& geometry, const PumpSpec& pump, const MaterialModel& model,
            std::optional<SpectralFilter> filter = std::nullopt, double band_sigmas = 6.0)
      : eval_(grid, geometry, pump, model), filter_(filter), band_sigmas_(band_sigmas) {
    if (filter_) filter_->validate();
    if (!(band_sigmas_ > 0.0)) throw ConfigError("band_sigmas must be > 0");
    const auto& ws = grid.omega_s();
    const auto& wi = grid.omega_i();
    const double wp = pump.central_omega();
    const double half_band = band_sigmas_ * pump.sigma_omega();
    rows_.resize(ws.count);
    for (std::size_t is = 0; is < ws.count; ++is) {
      const double lo = (wp - half_band - ws[is] - wi.start) / wi.step;
      const double hi = (wp + half_band - ws[is] - wi.start) / wi.step;
      const auto first = static_cast<std::ptrdiff_t>(std::ceil(lo));
      const auto last = static_cast<std::ptrdiff_t>(std::floor(hi));
      const auto clamp_lo = std::max<std::ptrdiff_t>(first, 0);
      const auto clamp_hi = std::min<std::ptrdiff_t>(last, static_cast<std::ptrdiff_t>(wi.count) - 1);
      rows_[is] = clamp_hi >= clamp_lo ? Row{static_cast<std::size_t>(clamp_lo), static_cast<std::size_t>(clamp_hi) + 1}
                                       : Row{0, 0};
    }
    const auto acc = chunked_reduce<detail::CompensatedSum>(
        rows_.size(), kRowChunk, [] { return detail::CompensatedSum{}; },
        [&](std::size_t r0, std::size_t r1, detail::CompensatedSum& part) {
          for_each_raw(r0, r1, [&](std::size_t, std::size_t, std::span<const cplx> s) {
            for (const auto& v : s) part.add(std::norm(v));
          });
        },
        [](detail::CompensatedSum& total, const detail::CompensatedSum& part) {
          total.add(part.sum);
          total.add(part.carry);
        });
    const double power = acc.value() * grid.cell_measure();
    if (!(power > 0.0) || !std::isfinite(power)) throw EmptyStateError("banded amplitude has zero total power");
    scale_ = 1.0 / std::sqrt(power);
  }

  const Grid& grid() const { return eval_.grid(); }
  const JsaEvaluator& evaluator() const { return eval_; }
  bool is_normalized() const { return true; }
  double scale() const { return scale_; }

  /// Idler index range [begin, end) evaluated for signal row `is`.
  std::pair<std::size_t, std::size_t> row_range(std::size_t is) const { return {rows_[is].begin, rows_[is].end}; }

  std::size_t evaluated_slices() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.end - r.begin;
    return n;
  }

  std::size_t rows() const { return rows_.size(); }

  template <class Fn>
  void for_each_slice_in_rows(std::size_t row_begin, std::size_t row_end, Fn&& fn) const {
    std::vector<cplx> buf(grid().nk() * grid().nk());
    for_each_raw(row_begin, row_end, [&](std::size_t is, std::size_t ii, std::span<const cplx> s) {
      for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = s[j] * scale_;
      fn(is, ii, std::span<const cplx>(buf));
    });
  }

  template <class Fn>
  void for_each_slice(Fn&& fn) const {
    for_each_slice_in_rows(0, rows(), fn);
  }

  /// Materialises the band into a dense tensor (entries outside the band are zero).
  JsaTensor to_dense() const {
    const auto& g = grid();
    const std::size_t entries = g.omega_s().count * g.omega_i().count * g.nk() * g.nk();
    if (entries > kMaxDenseEntries) throw ConfigError("grid too large for a dense tensor");
    JsaTensor out(g);
    for_each_slice([&](std::size_t is, std::size_t ii, std::span<const cplx> s) {
      std::copy(s.begin(), s.end(), out.slice(is, ii).begin());
    });
    out.set_normalized(true);
    return out;
  }

 private:
  struct Row {
    std::size_t begin = 0;
    std::size_t end = 0;
  };

  template <class Fn>
  void for_each_raw(std::size_t row_begin, std::size_t row_end, Fn&& fn) const {
    std::vector<cplx> local(grid().nk() * grid().nk());
    const auto& g = grid();
    for (std::size_t is = row_begin; is < row_end; ++is) {
      for (std::size_t ii = rows_[is].begin; ii < rows_[is].end; ++ii) {
        if (filter_ && !filter_->passes(g.omega_s()[is], g.omega_i()[ii])) continue;
        eval_.fill_slice(is, ii, local);
        fn(is, ii, std::span<const cplx>(local));
      }
    }
  }

  JsaEvaluator eval_;
  std::optional<SpectralFilter> filter_;
  double band_sigmas_;
  std::vector<Row> rows_;
  double scale_ = 1.0;
};

}  // namespace wgapdc
