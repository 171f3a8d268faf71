#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wgapdc/errors.hpp"
#include "wgapdc/grid.hpp"
#include "wgapdc/units.hpp"

namespace wgapdc {

/// Unitary momentum -> channel transform on an N-channel ring,
///   U(n, k) = exp(i k n) / sqrt(N),
/// applied to both photon indices of an N x N slice as U F U^T.
class ChannelTransform {
 public:
  explicit ChannelTransform(const Grid& grid) : n_(grid.nk()), fwd_(n_ * n_), inv_(n_ * n_), tmp_(n_ * n_) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_));
    for (std::size_t m = 0; m < n_; ++m) {
      const double label = grid.channel_label(m);
      for (std::size_t j = 0; j < n_; ++j) {
        // reduce k * n modulo 2 pi before the exponential to keep round-off flat in N
        const double phase = std::remainder(grid.k(j) * label, kTwoPi);
        fwd_[m * n_ + j] = std::polar(norm, phase);
        inv_[j * n_ + m] = std::conj(fwd_[m * n_ + j]);
      }
    }
  }

  std::size_t size() const { return n_; }

  /// out(ns, ni) = sum_{a,b} U(ns, a) U(ni, b) in(a, b).
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    apply(fwd_, in, out);
  }
  void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    apply(inv_, in, out);
  }

  std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in) const {
    std::vector<std::complex<double>> out(in.size());
    forward(in, out);
    return out;
  }
  std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in) const {
    std::vector<std::complex<double>> out(in.size());
    inverse(in, out);
    return out;
  }

 private:
  // Two separable passes: tmp = M in, out = tmp M^T. Not thread safe (scratch).
  void apply(const std::vector<std::complex<double>>& m, std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out) const {
    if (in.size() != n_ * n_ || out.size() != n_ * n_) throw PreconditionError("ChannelTransform: slice size mismatch");
    auto& tmp = tmp_;
    for (std::size_t r = 0; r < n_; ++r) {
      std::complex<double>* t = &tmp[r * n_];
      for (std::size_t c = 0; c < n_; ++c) t[c] = {};
      for (std::size_t a = 0; a < n_; ++a) {
        const std::complex<double> w = m[r * n_ + a];
        const std::complex<double>* src = &in[a * n_];
        for (std::size_t c = 0; c < n_; ++c) t[c] += w * src[c];
      }
    }
    for (std::size_t r = 0; r < n_; ++r) {
      const std::complex<double>* t = &tmp[r * n_];
      for (std::size_t c = 0; c < n_; ++c) {
        const std::complex<double>* row = &m[c * n_];
        std::complex<double> acc{};
        for (std::size_t b = 0; b < n_; ++b) acc += row[b] * t[b];
        out[r * n_ + c] = acc;
      }
    }
  }

  std::size_t n_;
  std::vector<std::complex<double>> fwd_;
  std::vector<std::complex<double>> inv_;
  mutable std::vector<std::complex<double>> tmp_;
};

}  // namespace wgapdc
