#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "wgapdc/dft.hpp"
#include "wgapdc/errors.hpp"
#include "wgapdc/grid.hpp"
#include "wgapdc/jsa.hpp"
#include "wgapdc/parallel.hpp"
#include "wgapdc/units.hpp"

namespace wgapdc {

/// Frequency-traced two-photon maps. Values are probabilities per grid cell
/// (the diagonal factor included), so each map sums to 1 plus its diagonal
/// excess.
struct CorrelationMaps {
  Array2<double> gamma_k;
  Array2<double> gamma_n;
  /// arg of the frequency-integrated momentum amplitude.
  Array2<double> phase_k;
  /// Mass contributed by the factor-4 cells (the extra 3 |f|^2), per map.
  double diagonal_excess_k = 0.0;
  double diagonal_excess_n = 0.0;
  Grid grid;
  std::vector<int> channel_axis;
  std::vector<double> k_axis;
};

/// Single-photon channel- and wavelength-resolved intensity. `intensity` is a
/// density per unit wavelength [1/m]; `cell_width` holds the wavelength extent
/// of each sample so sum(intensity * cell_width) is the detected mass.
struct SpatioSpectralMap {
  Array2<double> intensity;  // rows = channels, cols = wavelengths
  std::vector<double> wavelength;
  std::vector<double> cell_width;
  std::vector<int> channels;

  std::size_t channel_row(int channel) const {
    if (channels.empty() || channel < channels.front() || channel > channels.back()) {
      std::ostringstream os;
      os << "channel " << channel << " outside the map";
      throw PreconditionError(os.str());
    }
    return static_cast<std::size_t>(channel - channels.front());
  }

  double mass() const {
    double m = 0.0;
    for (std::size_t r = 0; r < intensity.rows(); ++r)
      for (std::size_t c = 0; c < intensity.cols(); ++c) m += intensity(r, c) * cell_width[c];
    return m;
  }
};

namespace detail {

template <SliceSource S>
void require_normalized(const S& src, const char* what) {
  if (!src.is_normalized()) {
    std::ostringstream os;
    os << what << ": amplitude is not normalised";
    throw ContractError(os.str());
  }
}

inline double diagonal_weight(bool coincide, std::size_t a, std::size_t b) { return coincide && a == b ? 4.0 : 1.0; }

}  // namespace detail

/// Pointwise correlation density over (omega_s, omega_i, k_s, k_i), same
/// layout as the tensor: |f|^2, times 4 on the exact grid diagonal.
inline std::vector<double> gamma_k_omega(const JsaTensor& jsa) {
  detail::require_normalized(jsa, "gamma_k_omega");
  const auto& g = jsa.grid();
  std::vector<double> out(jsa.values().size());
  const std::size_t n = g.nk();
  for (std::size_t is = 0; is < g.omega_s().count; ++is) {
    for (std::size_t ii = 0; ii < g.omega_i().count; ++ii) {
      const bool co = g.frequencies_coincide(is, ii);
      const std::size_t off = jsa.slice_offset(is, ii);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          out[off + a * n + b] = detail::diagonal_weight(co, a, b) * std::norm(jsa.values()[off + a * n + b]);
    }
  }
  return out;
}

/// Computes gamma_k, gamma_n and phase_k in one streaming pass.
template <SliceSource S>
CorrelationMaps correlation_maps(const S& src) {
  detail::require_normalized(src, "correlation_maps");
  const Grid& g = src.grid();
  const std::size_t n = g.nk();
  const double cell = g.cell_measure();

  struct Partial {
    std::vector<double> gk, gn;
    std::vector<cplx> coherent;
    double excess_k = 0.0, excess_n = 0.0;
  };
  auto make = [n] { return Partial{std::vector<double>(n * n), std::vector<double>(n * n), std::vector<cplx>(n * n)}; };

  auto total = chunked_reduce<Partial>(
      src.rows(), kRowChunk, make,
      [&](std::size_t r0, std::size_t r1, Partial& p) {
        const ChannelTransform tr(g);
        std::vector<cplx> nspace(n * n);
        src.for_each_slice_in_rows(r0, r1, [&](std::size_t is, std::size_t ii, std::span<const cplx> f) {
          const bool co = g.frequencies_coincide(is, ii);
          tr.forward(f, nspace);
          for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
              const std::size_t j = a * n + b;
              const double pk = std::norm(f[j]) * cell;
              const double pn = std::norm(nspace[j]) * cell;
              if (co && a == b) {
                p.gk[j] += 4.0 * pk;
                p.gn[j] += 4.0 * pn;
                p.excess_k += 3.0 * pk;
                p.excess_n += 3.0 * pn;
              } else {
                p.gk[j] += pk;
                p.gn[j] += pn;
              }
              p.coherent[j] += f[j];
            }
          }
        });
      },
      [](Partial& t, const Partial& p) {
        for (std::size_t j = 0; j < t.gk.size(); ++j) {
          t.gk[j] += p.gk[j];
          t.gn[j] += p.gn[j];
          t.coherent[j] += p.coherent[j];
        }
        t.excess_k += p.excess_k;
        t.excess_n += p.excess_n;
      });

  CorrelationMaps out;
  out.grid = g;
  out.channel_axis = g.channel_axis();
  out.k_axis = g.k_axis();
  out.gamma_k = Array2<double>(n, n);
  out.gamma_n = Array2<double>(n, n);
  out.phase_k = Array2<double>(n, n);
  out.gamma_k.data() = std::move(total.gk);
  out.gamma_n.data() = std::move(total.gn);
  for (std::size_t j = 0; j < n * n; ++j)
    out.phase_k.data()[j] = total.coherent[j] == cplx{} ? 0.0 : std::arg(total.coherent[j]);
  out.diagonal_excess_k = total.excess_k;
  out.diagonal_excess_n = total.excess_n;
  return out;
}

template <SliceSource S>
Array2<double> gamma_k(const S& src) {
  return correlation_maps(src).gamma_k;
}

template <SliceSource S>
Array2<double> gamma_n(const S& src) {
  return correlation_maps(src).gamma_n;
}

/// |U F U^T|^2 of one fixed-frequency momentum slice, scaled to unit sum.
inline Array2<double> channel_probability(std::span<const cplx> kslice, const Grid& grid) {
  const std::size_t n = grid.nk();
  const ChannelTransform tr(grid);
  std::vector<cplx> ns(n * n);
  tr.forward(kslice, ns);
  Array2<double> out(n, n);
  double total = 0.0;
  for (std::size_t j = 0; j < n * n; ++j) total += (out.data()[j] = std::norm(ns[j]));
  if (!(total > 0.0)) throw EmptyStateError("channel_probability: zero slice");
  for (auto& v : out.data()) v /= total;
  return out;
}

template <SliceSource S>
SpatioSpectralMap spatio_spectral_intensity(const S& src) {
  detail::require_normalized(src, "spatio_spectral_intensity");
  const Grid& g = src.grid();
  if (!g.symmetric_axes()) throw ContractError("spatio_spectral_intensity: signal and idler axes must coincide");
  const std::size_t n = g.nk();
  const std::size_t m = g.omega_s().count;
  const double cell = g.cell_measure();

  struct Entry {
    std::size_t freq;
    std::vector<double> per_channel;
  };
  using Partial = std::vector<Entry>;

  auto total = chunked_reduce<std::vector<double>>(
      src.rows(), kRowChunk, [&] { return std::vector<double>(); },
      [&](std::size_t r0, std::size_t r1, std::vector<double>& out) {
        const ChannelTransform tr(g);
        std::vector<cplx> nspace(n * n);
        Partial entries;
        src.for_each_slice_in_rows(r0, r1, [&](std::size_t is, std::size_t ii, std::span<const cplx> f) {
          tr.forward(f, nspace);
          Entry sig{is, std::vector<double>(n)};
          Entry idl{ii, std::vector<double>(n)};
          for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
              const double p = std::norm(nspace[a * n + b]) * cell;
              sig.per_channel[a] += p;
              idl.per_channel[b] += p;
            }
          }
          entries.push_back(std::move(sig));
          entries.push_back(std::move(idl));
        });
        // flatten as (freq, n values) records
        out.reserve(entries.size() * (n + 1));
        for (auto& e : entries) {
          out.push_back(static_cast<double>(e.freq));
          out.insert(out.end(), e.per_channel.begin(), e.per_channel.end());
        }
      },
      [&](std::vector<double>& acc, const std::vector<double>& part) {
        if (acc.empty()) acc.assign(n * m, 0.0);
        for (std::size_t off = 0; off < part.size(); off += n + 1) {
          const auto freq = static_cast<std::size_t>(part[off]);
          for (std::size_t c = 0; c < n; ++c) acc[c * m + freq] += part[off + 1 + c];
        }
      });
  if (total.empty()) total.assign(n * m, 0.0);

  SpatioSpectralMap map;
  map.channels = g.channel_axis();
  map.wavelength.resize(m);
  map.cell_width.resize(m);
  map.intensity = Array2<double>(n, m);
  const double dw = m > 1 ? g.omega_s().step : 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t f = m - 1 - j;  // ascending wavelength = descending frequency
    const double lambda = omega_to_wavelength(g.omega_s()[f]);
    map.wavelength[j] = lambda;
    map.cell_width[j] = lambda * lambda * dw / (kTwoPi * kSpeedOfLight);
    for (std::size_t c = 0; c < n; ++c) map.intensity(c, j) = total[c * m + f] / map.cell_width[j];
  }
  return map;
}

/// Row S(channel, .) of the map.
inline std::vector<double> spectral_marginal(const SpatioSpectralMap& map, int channel) {
  const std::size_t r = map.channel_row(channel);
  std::vector<double> out(map.intensity.cols());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = map.intensity(r, c);
  return out;
}

/// Channel profile integrated over [lambda_min, lambda_max], central channel scaled to 1.
inline std::vector<double> spatial_marginal(const SpatioSpectralMap& map, double lambda_min, double lambda_max) {
  if (!(lambda_min < lambda_max)) throw PreconditionError("spatial_marginal: band bounds not ordered");
  std::vector<double> out(map.intensity.rows(), 0.0);
  bool any = false;
  for (std::size_t c = 0; c < map.wavelength.size(); ++c) {
    if (map.wavelength[c] < lambda_min || map.wavelength[c] > lambda_max) continue;
    any = true;
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += map.intensity(r, c) * map.cell_width[c];
  }
  if (!any) throw EmptyStateError("spatial_marginal: band contains no wavelength sample");
  const double centre = out[map.channel_row(0)];
  if (!(centre > 0.0)) throw EmptyStateError("spatial_marginal: central channel carries no intensity in band");
  for (auto& v : out) v /= centre;
  return out;
}

/// Gaussian convolution along wavelength with the given intensity FWHM.
/// Each source sample's mass is spread with weights that sum to one, so the
/// total mass is unchanged.
inline SpatioSpectralMap smooth_spectral(const SpatioSpectralMap& map, double resolution_fwhm) {
  if (!(resolution_fwhm > 0.0)) throw PreconditionError("smooth_spectral: resolution must be > 0");
  const double sigma = resolution_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const std::size_t m = map.wavelength.size();
  const double reach = 10.0 * sigma;
  SpatioSpectralMap out = map;
  for (auto& v : out.intensity.data()) v = 0.0;
  std::vector<double> w;
  for (std::size_t j = 0; j < m; ++j) {
    const double lj = map.wavelength[j];
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(map.wavelength.begin(), map.wavelength.end(), lj - reach) - map.wavelength.begin());
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(map.wavelength.begin(), map.wavelength.end(), lj + reach) - map.wavelength.begin());
    w.assign(hi - lo, 0.0);
    double norm = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double d = (map.wavelength[i] - lj) / sigma;
      w[i - lo] = std::exp(-0.5 * d * d) * map.cell_width[i];
      norm += w[i - lo];
    }
    for (std::size_t r = 0; r < map.intensity.rows(); ++r) {
      const double mass = map.intensity(r, j) * map.cell_width[j];
      if (mass == 0.0) continue;
      for (std::size_t i = lo; i < hi; ++i) out.intensity(r, i) += mass * w[i - lo] / norm;
    }
  }
  for (std::size_t r = 0; r < out.intensity.rows(); ++r)
    for (std::size_t i = 0; i < m; ++i) out.intensity(r, i) /= map.cell_width[i];
  return out;
}

/// Channel profile integrated over the whole wavelength axis.
inline std::vector<double> channel_profile(const SpatioSpectralMap& map) {
  std::vector<double> out(map.intensity.rows(), 0.0);
  for (std::size_t r = 0; r < out.size(); ++r)
    for (std::size_t c = 0; c < map.wavelength.size(); ++c) out[r] += map.intensity(r, c) * map.cell_width[c];
  return out;
}

/// Spectrum summed over channels (density per unit wavelength).
inline std::vector<double> channel_integrated_spectrum(const SpatioSpectralMap& map) {
  std::vector<double> out(map.wavelength.size(), 0.0);
  for (std::size_t r = 0; r < map.intensity.rows(); ++r)
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += map.intensity(r, c);
  return out;
}

/// Number of entries at or above `fraction` of the entry at `reference_index`.
inline int spread_count(std::span<const double> profile, std::size_t reference_index, double fraction) {
  if (reference_index >= profile.size()) throw PreconditionError("spread_count: reference outside profile");
  const double thr = fraction * profile[reference_index];
  int count = 0;
  for (double v : profile)
    if (v >= thr) ++count;
  return count;
}

/// Full width at half maximum of the peak containing `peak`, by linear
/// interpolation of the half-maximum crossings, searched within [lo, hi).
/// Empty when the profile does not fall below half on both sides.
inline std::optional<double> fwhm_around(std::span<const double> x, std::span<const double> y, std::size_t peak,
                                         std::size_t lo, std::size_t hi) {
  if (x.size() != y.size() || peak >= y.size() || lo > peak || hi <= peak || hi > y.size()) return std::nullopt;
  const double half = 0.5 * y[peak];
  if (!(half > 0.0)) return std::nullopt;
  std::optional<double> left, right;
  for (std::size_t i = peak; i > lo; --i) {
    if (y[i - 1] < half) {
      const double t = (half - y[i - 1]) / (y[i] - y[i - 1]);
      left = x[i - 1] + t * (x[i] - x[i - 1]);
      break;
    }
  }
  for (std::size_t i = peak; i + 1 < hi; ++i) {
    if (y[i + 1] < half) {
      const double t = (y[i] - half) / (y[i] - y[i + 1]);
      right = x[i] + t * (x[i + 1] - x[i]);
      break;
    }
  }
  if (!left || !right) return std::nullopt;
  return *right - *left;
}

inline std::optional<double> fwhm(std::span<const double> x, std::span<const double> y) {
  if (y.empty()) return std::nullopt;
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  return fwhm_around(x, y, peak, 0, y.size());
}

/// Strict local maxima reaching at least `fraction` of the global maximum,
/// kept only when a strictly lower sample separates consecutive ones.
inline std::vector<std::size_t> significant_peaks(std::span<const double> y, double fraction = 0.5) {
  std::vector<std::size_t> out;
  if (y.size() < 3) return out;
  const double top = *std::max_element(y.begin(), y.end());
  if (!(top > 0.0)) return out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    // plateau-aware: compare against the nearest differing neighbours
    if (y[i] < fraction * top) continue;
    std::size_t j = i;
    while (j + 1 < y.size() && y[j + 1] == y[i]) ++j;
    const bool rises = y[i - 1] < y[i];
    const bool falls = j + 1 < y.size() && y[j + 1] < y[i];
    if (rises && falls) {
      if (out.empty()) {
        out.push_back(i);
      } else {
        const double floor = *std::min_element(y.begin() + static_cast<std::ptrdiff_t>(out.back()),
                                               y.begin() + static_cast<std::ptrdiff_t>(i));
        if (floor < std::min(y[out.back()], y[i])) out.push_back(i);
      }
    }
    i = j;
  }
  return out;
}

inline bool is_bimodal(std::span<const double> y, double fraction = 0.5) { return significant_peaks(y, fraction).size() >= 2; }

/// Peak position from a parabola through the top sample and its neighbours.
inline double parabolic_peak(std::span<const double> x, std::span<const double> y, std::size_t i) {
  if (i == 0 || i + 1 >= y.size()) return x[i];
  const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
  const double den = y0 - 2.0 * y1 + y2;
  if (den == 0.0) return x[i];
  const double p = std::clamp(0.5 * (y0 - y2) / den, -0.5, 0.5);
  return p >= 0.0 ? x[i] + p * (x[i + 1] - x[i]) : x[i] + p * (x[i] - x[i - 1]);
}

struct BranchPeaks {
  double pump_wavelength = 0.0;
  /// Shorter- and longer-wavelength branch maxima; equal on a single degenerate branch.
  std::optional<double> lambda_s;
  std::optional<double> lambda_i;
  std::optional<double> fwhm_s;
  std::optional<double> fwhm_i;
  bool degenerate = false;

  double separation() const { return lambda_s && lambda_i ? *lambda_i - *lambda_s : 0.0; }
};

/// Locates the two spectral branches of a marginal split at 2 lambda_p.
inline BranchPeaks find_branches(std::span<const double> lambda, std::span<const double> y, double pump_wavelength,
                                 double degenerate_fraction = 0.5) {
  BranchPeaks out;
  out.pump_wavelength = pump_wavelength;
  if (y.empty()) return out;
  const auto gmax_it = std::max_element(y.begin(), y.end());
  const double gmax = *gmax_it;
  if (!(gmax > 0.0)) return out;
  const double split = 2.0 * pump_wavelength;
  const auto s = static_cast<std::size_t>(std::lower_bound(lambda.begin(), lambda.end(), split) - lambda.begin());

  // value of the marginal at the degeneracy wavelength
  double at_split = 0.0;
  if (s == 0) at_split = y.front();
  else if (s >= y.size()) at_split = y.back();
  else {
    const double t = (split - lambda[s - 1]) / (lambda[s] - lambda[s - 1]);
    at_split = y[s - 1] + t * (y[s] - y[s - 1]);
  }
  if (at_split >= degenerate_fraction * gmax) {
    const auto peak = static_cast<std::size_t>(gmax_it - y.begin());
    out.degenerate = true;
    // centre as the half-maximum midpoint in frequency
    const double half = 0.5 * gmax;
    std::optional<double> l, r;
    for (std::size_t i = peak; i > 0; --i)
      if (y[i - 1] < half) {
        const double t = (half - y[i - 1]) / (y[i] - y[i - 1]);
        l = lambda[i - 1] + t * (lambda[i] - lambda[i - 1]);
        break;
      }
    for (std::size_t i = peak; i + 1 < y.size(); ++i)
      if (y[i + 1] < half) {
        const double t = (y[i] - half) / (y[i] - y[i + 1]);
        r = lambda[i] + t * (lambda[i + 1] - lambda[i]);
        break;
      }
    double centre = parabolic_peak(lambda, y, peak);
    if (l && r) {
      centre = omega_to_wavelength(0.5 * (wavelength_to_omega(*l) + wavelength_to_omega(*r)));
      out.fwhm_s = out.fwhm_i = *r - *l;
    }
    out.lambda_s = out.lambda_i = centre;
    return out;
  }

  auto side = [&](std::size_t lo, std::size_t hi, std::optional<double>& peak_out, std::optional<double>& width_out) {
    if (hi <= lo) return;
    const auto it = std::max_element(y.begin() + static_cast<std::ptrdiff_t>(lo), y.begin() + static_cast<std::ptrdiff_t>(hi));
    const auto i = static_cast<std::size_t>(it - y.begin());
    if (!(*it > 1e-3 * gmax)) return;
    if ((i == lo && lo > 0) || (i + 1 == hi && hi < y.size())) return;  // maximum sits on the split
    peak_out = parabolic_peak(lambda, y, i);
    width_out = fwhm_around(lambda, y, i, lo, hi);
  };
  side(0, s, out.lambda_s, out.fwhm_s);
  side(s, y.size(), out.lambda_i, out.fwhm_i);
  return out;
}

}  // namespace wgapdc
