#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "wgapdc/errors.hpp"
#include "wgapdc/units.hpp"

namespace wgapdc {

/// Row-major dense 2D array with value semantics.
template <class T>
class Array2 {
 public:
  Array2() = default;
  Array2(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Array2&, const Array2&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

struct UniformAxis {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double operator[](std::size_t i) const { return start + step * static_cast<double>(i); }
  double back() const { return (*this)[count - 1]; }

  friend bool operator==(const UniformAxis&, const UniformAxis&) = default;
};

/// Sampling of the joint amplitude: two angular-frequency axes and the N
/// discrete transverse momenta of an N-channel ring,
///   k_j = 2 pi (j - floor(N/2)) / N,  j = 0..N-1,
/// so that channel labels n = j - floor(N/2) and the k <-> n transform is an
/// exact unitary pair.
class Grid {
 public:
  Grid() = default;
  Grid(UniformAxis omega_s, UniformAxis omega_i, int channel_count)
      : omega_s_(omega_s), omega_i_(omega_i), channels_(channel_count) {
    validate();
  }

  /// Same axis for both photons, uniform in omega, spanning [lambda_min, lambda_max].
  static Grid from_wavelengths(double lambda_min, double lambda_max, std::size_t points, int channel_count) {
    if (!(lambda_min > 0.0 && lambda_max > lambda_min)) throw ConfigError("grid: need 0 < lambda_min < lambda_max");
    if (points < 1) throw ConfigError("grid: need at least one frequency point");
    const double w0 = wavelength_to_omega(lambda_max);
    const double w1 = wavelength_to_omega(lambda_min);
    UniformAxis ax{w0, points > 1 ? (w1 - w0) / static_cast<double>(points - 1) : 1.0, points};
    if (points == 1) ax = UniformAxis{0.5 * (w0 + w1), 1.0, 1};
    return Grid(ax, ax, channel_count);
  }

  const UniformAxis& omega_s() const { return omega_s_; }
  const UniformAxis& omega_i() const { return omega_i_; }
  int channel_count() const { return channels_; }
  std::size_t nk() const { return static_cast<std::size_t>(channels_); }
  int half() const { return channels_ / 2; }

  double k(std::size_t j) const { return kTwoPi * (static_cast<double>(j) - half()) / channels_; }
  int channel_label(std::size_t j) const { return static_cast<int>(j) - half(); }

  std::vector<double> k_axis() const {
    std::vector<double> out(nk());
    for (std::size_t j = 0; j < nk(); ++j) out[j] = k(j);
    return out;
  }
  std::vector<int> channel_axis() const {
    std::vector<int> out(nk());
    for (std::size_t j = 0; j < nk(); ++j) out[j] = channel_label(j);
    return out;
  }

  /// Index of the k sample congruent to k_a + k_b modulo 2 pi.
  std::size_t sum_index(std::size_t a, std::size_t b) const {
    const auto n = static_cast<std::ptrdiff_t>(nk());
    auto c = (static_cast<std::ptrdiff_t>(a + b) - half()) % n;
    if (c < 0) c += n;
    return static_cast<std::size_t>(c);
  }

  /// Integration weight of one grid cell: d(omega_s) d(omega_i) dk_s dk_i.
  double cell_measure() const {
    const double dk = kTwoPi / channels_;
    return std::abs(omega_s_.step) * std::abs(omega_i_.step) * dk * dk;
  }
  double omega_cell() const { return std::abs(omega_s_.step) * std::abs(omega_i_.step); }
  double k_cell() const { return std::pow(kTwoPi / channels_, 2); }

  /// True when signal sample `is` and idler sample `ii` have the same frequency.
  bool frequencies_coincide(std::size_t is, std::size_t ii) const {
    const double a = omega_s_[is];
    const double b = omega_i_[ii];
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
  }

  /// Exchange partner of a tensor index exists when both axes are identical.
  bool symmetric_axes() const { return omega_s_ == omega_i_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  void validate() const {
    if (channels_ < 1) throw ConfigError("grid: channel count must be positive");
    for (const auto* ax : {&omega_s_, &omega_i_}) {
      if (ax->count < 1) throw ConfigError("grid: empty frequency axis");
      if (ax->count > 1 && !(ax->step > 0.0)) throw ConfigError("grid: frequency axes must be strictly increasing");
      if (!(ax->start > 0.0)) throw ConfigError("grid: frequencies must be positive");
    }
  }

  UniformAxis omega_s_{};
  UniformAxis omega_i_{};
  int channels_ = 0;
};

}  // namespace wgapdc
