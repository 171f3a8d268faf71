#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wgapdc/errors.hpp"
#include "wgapdc/grid.hpp"
#include "wgapdc/jsa.hpp"
#include "wgapdc/units.hpp"

namespace wgapdc::oracle {

/// (1/L) * trapezoidal integral of exp(i dbeta z) over [-L, 0].
inline cplx pm_integral(double delta_beta, double length, std::size_t z_steps) {
  if (z_steps < 100) throw PreconditionError("pm_integral: need at least 100 steps");
  if (!(length > 0.0)) throw PreconditionError("pm_integral: length must be > 0");
  const double h = length / static_cast<double>(z_steps);
  cplx acc = 0.5 * (std::polar(1.0, -delta_beta * length) + cplx{1.0, 0.0});
  for (std::size_t j = 1; j < z_steps; ++j) {
    const double z = -length + h * static_cast<double>(j);
    acc += std::polar(1.0, delta_beta * z);
  }
  return acc * h / length;
}

/// One Richardson step on the trapezoid rule: (4 T(2n) - T(n)) / 3.
inline cplx pm_integral_richardson(double delta_beta, double length, std::size_t z_steps) {
  const cplx coarse = pm_integral(delta_beta, length, z_steps);
  const cplx fine = pm_integral(delta_beta, length, 2 * z_steps);
  return (4.0 * fine - coarse) / 3.0;
}

/// Literal O(N^4) unitary transform
///   out(ns, ni) = sum_{a,b} exp(i (k_a ns + k_b ni)) in(a, b) / N.
inline std::vector<cplx> direct_dft2(const std::vector<cplx>& kspace, const Grid& grid) {
  const std::size_t n = grid.nk();
  if (kspace.size() != n * n) throw PreconditionError("direct_dft2: input must be N x N");
  std::vector<cplx> out(n * n);
  for (std::size_t ns = 0; ns < n; ++ns)
    for (std::size_t ni = 0; ni < n; ++ni) {
      cplx acc{};
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          acc += std::polar(1.0, grid.k(a) * grid.channel_label(ns) + grid.k(b) * grid.channel_label(ni)) *
                 kspace[a * n + b];
      out[ns * n + ni] = acc / static_cast<double>(n);
    }
  return out;
}

/// Inverse of direct_dft2, channels back to momenta.
inline std::vector<cplx> direct_idft2(const std::vector<cplx>& nspace, const Grid& grid) {
  const std::size_t n = grid.nk();
  if (nspace.size() != n * n) throw PreconditionError("direct_idft2: input must be N x N");
  std::vector<cplx> out(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      cplx acc{};
      for (std::size_t ns = 0; ns < n; ++ns)
        for (std::size_t ni = 0; ni < n; ++ni)
          acc += std::polar(1.0, -(grid.k(a) * grid.channel_label(ns) + grid.k(b) * grid.channel_label(ni))) *
                 nspace[ns * n + ni];
      out[a * n + b] = acc / static_cast<double>(n);
    }
  return out;
}

/// sum |f|^2 * cell measure, visiting momenta outermost and frequencies in
/// reverse, with Kahan-Babuska compensation.
inline double independent_power(const JsaTensor& jsa) {
  const auto& g = jsa.grid();
  const std::size_t n = g.nk();
  double sum = 0.0, comp = 0.0;
  for (std::size_t b = n; b-- > 0;)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t ii = g.omega_i().count; ii-- > 0;)
        for (std::size_t is = 0; is < g.omega_s().count; ++is) {
          const double v = std::norm(jsa.at(is, ii, a, b));
          const double t = sum + v;
          comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
          sum = t;
        }
  return (sum + comp) * g.cell_measure();
}

enum class Boundary { ring, open };

struct PropagationProblem {
  int channel_count = 51;
  double coupling_s = 400.0;  // 1/m
  double coupling_i = 400.0;  // 1/m
  double beta_mismatch = 0.0;  // Delta beta_omega, 1/m
  double length = 0.04;        // m
  /// (channel label, amplitude); labels run over [-(N-1)/2, (N-1)/2].
  std::vector<std::pair<int, cplx>> pump_channels{{0, cplx{1.0, 0.0}}};
  std::size_t z_steps = 100000;
  Boundary boundary = Boundary::ring;
  double convergence_tolerance = 1e-6;

  void validate() const {
    if (channel_count < 3 || channel_count % 2 == 0) throw PreconditionError("propagation: channel_count must be odd and >= 3");
    if (z_steps < 1000) throw PreconditionError("propagation: z_steps must be >= 1000");
    if (!(length > 0.0)) throw PreconditionError("propagation: length must be > 0");
    const int half = channel_count / 2;
    for (const auto& [m, a] : pump_channels)
      if (m < -half || m > half) throw PreconditionError("propagation: pump channel outside the array");
    if (pump_channels.empty()) throw EmptyStateError("propagation: no pumped channel");
  }
};

/// Nearest-neighbour coupling generator H with H(n, n+-1) = C; on the ring
/// its eigenvalues are 2 C cos k, so exp(-i H z) carries the array phase
/// exp(-2 i C cos(k) z) of each Bloch mode.
inline Eigen::MatrixXd coupling_generator(int channels, double coupling, Boundary boundary) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(channels, channels);
  for (int r = 0; r + 1 < channels; ++r) h(r, r + 1) = h(r + 1, r) = coupling;
  if (boundary == Boundary::ring) h(0, channels - 1) = h(channels - 1, 0) = coupling;
  return h;
}

/// exp(-i H z) for a real symmetric H via its eigendecomposition.
class Propagator {
 public:
  explicit Propagator(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw ConvergenceError("propagator: eigendecomposition failed");
    vectors_ = es.eigenvectors();
    values_ = es.eigenvalues();
  }

  /// Column `m` of exp(-i H z).
  Eigen::VectorXcd column(Eigen::Index m, double z) const {
    Eigen::VectorXcd w(values_.size());
    for (Eigen::Index j = 0; j < values_.size(); ++j) w(j) = std::polar(vectors_(m, j), -values_(j) * z);
    return vectors_.cast<cplx>() * w;
  }

  Eigen::MatrixXcd matrix(double z) const {
    Eigen::VectorXcd d(values_.size());
    for (Eigen::Index j = 0; j < values_.size(); ++j) d(j) = std::polar(1.0, -values_(j) * z);
    return vectors_.cast<cplx>() * d.asDiagonal() * vectors_.transpose().cast<cplx>();
  }

 private:
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd values_;
};

namespace detail {

inline Eigen::MatrixXcd pair_amplitude_at(const PropagationProblem& p, const Propagator& ps, const Propagator& pi,
                                          std::size_t z_steps) {
  const int n = p.channel_count;
  const int half = n / 2;
  const double h = p.length / static_cast<double>(z_steps);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t j = 0; j <= z_steps; ++j) {
    const double z = -p.length + h * static_cast<double>(j);
    const double w = (j == 0 || j == z_steps) ? 0.5 : 1.0;
    const cplx created = w * std::polar(1.0, p.beta_mismatch * z);
    for (std::size_t q = 0; q < p.pump_channels.size(); ++q) {
      const auto& [m, a] = p.pump_channels[q];
      const Eigen::VectorXcd us = ps.column(m + half, z);
      const Eigen::VectorXcd ui = pi.column(m + half, z);
      acc.noalias() += (created * a) * (us * ui.transpose());
    }
  }
  return acc * (h / p.length);
}

}  // namespace detail

/// Two-photon channel amplitude F(ns, ni) (row/column = channel label + (N-1)/2)
/// from real-space propagation: a pair created at depth z in channel m with
/// phase exp(i dbeta_omega z), each photon then evolved by exp(-i H z).
/// Raises ConvergenceError when doubling z_steps moves the result by more
/// than the tolerance (relative to its largest entry).
inline Eigen::MatrixXcd realspace_pair_amplitude(const PropagationProblem& problem) {
  problem.validate();
  const Propagator ps(coupling_generator(problem.channel_count, problem.coupling_s, problem.boundary));
  const Propagator pi(coupling_generator(problem.channel_count, problem.coupling_i, problem.boundary));
  const Eigen::MatrixXcd coarse = detail::pair_amplitude_at(problem, ps, pi, problem.z_steps);
  const Eigen::MatrixXcd fine = detail::pair_amplitude_at(problem, ps, pi, 2 * problem.z_steps);
  const double scale = std::max(fine.cwiseAbs().maxCoeff(), 1e-300);
  const double change = (fine - coarse).cwiseAbs().maxCoeff() / scale;
  if (change > problem.convergence_tolerance) {
    std::ostringstream os;
    os << "realspace_pair_amplitude: doubling z_steps changed the result by " << change;
    throw ConvergenceError(os.str());
  }
  return fine;
}

}  // namespace wgapdc::oracle
