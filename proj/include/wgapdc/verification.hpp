#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wgapdc/correlations.hpp"
#include "wgapdc/dft.hpp"
#include "wgapdc/jsa.hpp"
#include "wgapdc/oracle.hpp"
#include "wgapdc/pipeline.hpp"
#include "wgapdc/scenarios.hpp"

namespace wgapdc::verification {

struct CheckResult {
  std::string name;
  bool pass = false;
  double metric = 0.0;     // worst observed deviation
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

template <class Fn>
CheckResult timed(const std::string& name, double tol, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = name;
  r.tolerance = tol;
  try {
    fn(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("raised: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline cplx random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng)};
}

}  // namespace detail

/// phase_match_factor against the Richardson-extrapolated trapezoid for random mismatches.
inline CheckResult check_phase_match_factor(int samples = 100, std::size_t steps = 1000000, std::uint64_t seed = 7) {
  return detail::timed("phase_match_factor vs pm_integral", 1e-8, [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1e4, 1e4);
    const double length = 0.04;
    for (int s = 0; s < samples; ++s) {
      const double db = u(rng);
      r.metric = std::max(r.metric, std::abs(phase_match_factor(db, length) - oracle::pm_integral_richardson(db, length, steps)));
    }
    r.pass = r.metric <= r.tolerance;
    r.detail = std::to_string(samples) + " random mismatches in [-1e4, 1e4] 1/m";
  });
}

/// Separable transform against the literal quadruple sum for random slices.
inline CheckResult check_transform(int samples = 100, std::uint64_t seed = 11) {
  return detail::timed("channel transform vs direct_dft2", 1e-9, [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nd(1, 25);
    for (int s = 0; s < samples; ++s) {
      const int n = 2 * nd(rng) + 1;
      const Grid g(UniformAxis{1e15, 1.0, 1}, UniformAxis{1e15, 1.0, 1}, n);
      std::vector<cplx> in(static_cast<std::size_t>(n * n));
      for (auto& v : in) v = detail::random_complex(rng);
      const auto fast = ChannelTransform(g).forward(in);
      const auto slow = oracle::direct_dft2(in, g);
      for (std::size_t j = 0; j < in.size(); ++j) r.metric = std::max(r.metric, std::abs(fast[j] - slow[j]));
    }
    r.pass = r.metric <= r.tolerance;
    r.detail = std::to_string(samples) + " random slices, N odd in [3, 51]";
  });
}

/// Fixed-frequency channel probability of the fast path for a degenerate
/// frequency pair whose mismatch is `mismatch`, constant coupling c0.
struct FixedFrequencyCase {
  Grid grid;
  std::vector<cplx> kslice;
  double delta_beta_omega = 0.0;
};

inline FixedFrequencyCase fixed_frequency_slice(double c0, int channels, double mismatch, double length = 0.04) {
  RunConfig cfg = scenario_preset("fig10_near_degenerate");
  cfg.coupling_constant_per_m = c0;
  cfg.channel_count = channels;
  cfg.length_m = length;
  MaterialModel model = cfg.material();
  const double lp = tune_pump_for_mismatch(model, mismatch, cfg.pump_wavelength_nm * kNanometre);
  PumpSpec pump = cfg.pump();
  pump.central_wavelength = lp;
  const double w = 0.5 * wavelength_to_omega(lp);
  const Grid g(UniformAxis{w, 1.0, 1}, UniformAxis{w, 1.0, 1}, channels);
  const JsaEvaluator eval(g, cfg.geometry(), pump, model);
  FixedFrequencyCase out{g, std::vector<cplx>(g.nk() * g.nk()), eval.delta_beta_omega_at(0, 0)};
  eval.fill_slice(0, 0, out.kslice);
  return out;
}

/// Real-space propagation oracle against the fast path for the three near-degenerate regimes.
inline CheckResult check_realspace(double c0 = 400.0, int channels = 51, std::size_t z_steps = 100000) {
  return detail::timed("realspace_pair_amplitude vs fixed-frequency gamma_n", 1e-6, [&](CheckResult& r) {
    std::ostringstream os;
    for (const double target : {0.0, 2.0 * c0, -2.0 * c0}) {
      const auto fc = fixed_frequency_slice(c0, channels, target);
      const auto fast = channel_probability(fc.kslice, fc.grid);
      oracle::PropagationProblem prob;
      prob.channel_count = channels;
      prob.coupling_s = prob.coupling_i = c0;
      prob.beta_mismatch = fc.delta_beta_omega;
      prob.z_steps = z_steps;
      const auto amp = oracle::realspace_pair_amplitude(prob);
      double total = 0.0;
      for (int a = 0; a < channels; ++a)
        for (int b = 0; b < channels; ++b) total += std::norm(amp(a, b));
      double dev = 0.0, top = 0.0;
      for (int a = 0; a < channels; ++a)
        for (int b = 0; b < channels; ++b) {
          const double slow = std::norm(amp(a, b)) / total;
          dev = std::max(dev, std::abs(slow - fast(a, b)));
          top = std::max(top, fast(a, b));
        }
      r.metric = std::max(r.metric, dev / top);
      os << "dbw=" << fc.delta_beta_omega << " rel " << dev / top << "; ";
    }
    r.pass = r.metric <= r.tolerance;
    r.detail = os.str();
  });
}

/// Small random configuration for the invariant suite.
struct RandomCase {
  Grid grid;
  ArrayGeometry geometry;
  PumpSpec pump;
  MaterialModel model;
};

inline RandomCase random_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nd(1, 7), fd(2, 6), kind(0, 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 2 * nd(rng) + 1;
  const std::size_t points = static_cast<std::size_t>(fd(rng));
  RandomCase c;
  c.model.coupling_scale = 0.02 + 0.15 * u(rng);
  if (kind(rng)) c.model.constant_coupling = 50.0 + 600.0 * u(rng);
  c.geometry = {0.005 + 0.05 * u(rng), n, c.model.temperature_c};
  const double centre = 1500e-9 + 100e-9 * u(rng);
  const double half = (0.1 + 20.0 * u(rng)) * 1e-9;
  c.grid = Grid::from_wavelengths(centre - half, centre + half, points, n);
  c.model.qpm_period = fit_qpm_period({centre, centre}, 0.5 * centre, c.model) * (1.0 + 1e-4 * (u(rng) - 0.5));
  c.pump.central_wavelength = 0.5 * centre * (1.0 + 2e-4 * (u(rng) - 0.5));
  c.pump.spectral_fwhm = (0.05 + 2.0 * u(rng)) * 1e-9;
  if (kind(rng)) {
    PerChannelPump pc;
    pc.amplitudes.clear();
    const int half_n = n / 2;
    std::uniform_int_distribution<int> ch(-half_n, half_n), cnt(1, 3);
    for (int j = cnt(rng); j > 0; --j) pc.amplitudes.emplace_back(ch(rng), detail::random_complex(rng));
    c.pump.spatial = pc;
  } else {
    c.pump.spatial = KWindowPump{kPi * (2.0 * u(rng) - 1.0), 0.5 + 5.0 * u(rng), {u(rng), 3.0 * u(rng), 2.0 * u(rng)}};
  }
  return c;
}

/// Exchange symmetry, Parseval, normalisation idempotence and independent
/// power, 2 pi wrap invariance and per-photon unitarity over random cases.
inline std::vector<CheckResult> check_invariants(int cases = 100, std::uint64_t seed = 23) {
  std::vector<CheckResult> out;
  std::vector<RandomCase> pool;
  std::vector<JsaTensor> tensors;
  std::mt19937_64 rng(seed);
  while (static_cast<int>(pool.size()) < cases) {
    RandomCase c = random_case(rng);
    JsaTensor t;
    try {
      t = build_jsa(c.grid, c.geometry, c.pump, c.model);
    } catch (const EmptyStateError&) {
      continue;  // pump window misses every momentum sample; draw again
    }
    if (!(t.power() > 0.0)) continue;
    pool.push_back(std::move(c));
    tensors.push_back(normalize(std::move(t)));
  }
  const std::string tag = " (" + std::to_string(cases) + " random configurations)";

  out.push_back(detail::timed("exchange symmetry" + tag, 0.0, [&](CheckResult& r) {
    for (const auto& t : tensors) {
      const auto& g = t.grid();
      for (std::size_t is = 0; is < g.omega_s().count; ++is)
        for (std::size_t ii = 0; ii < g.omega_i().count; ++ii)
          for (std::size_t a = 0; a < g.nk(); ++a)
            for (std::size_t b = 0; b < g.nk(); ++b)
              r.metric = std::max(r.metric, std::abs(t.at(is, ii, a, b) - t.at(ii, is, b, a)));
    }
    r.pass = r.metric == 0.0;
    r.detail = "exact equality";
  }));

  out.push_back(detail::timed("Parseval k <-> n" + tag, 1e-9, [&](CheckResult& r) {
    for (const auto& t : tensors) {
      const auto maps = correlation_maps(t);
      double sk = 0.0, sn = 0.0;
      for (double v : maps.gamma_k.data()) sk += v;
      for (double v : maps.gamma_n.data()) sn += v;
      const double base_k = sk - maps.diagonal_excess_k;
      const double base_n = sn - maps.diagonal_excess_n;
      r.metric = std::max(r.metric, std::abs(base_k - base_n) / base_k);
      r.metric = std::max(r.metric, std::abs(base_k - 1.0));
    }
    r.pass = r.metric <= r.tolerance;
    r.detail = "non-diagonal mass equal in both bases and equal to 1";
  }));

  out.push_back(detail::timed("normalisation idempotence and independent power" + tag, 1e-9, [&](CheckResult& r) {
    double worst_pair = 0.0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      const auto once = tensors[c];
      const auto twice = normalize(once);
      if (twice.values() != once.values()) r.metric = std::max(r.metric, 1.0);
      r.metric = std::max(r.metric, std::abs(oracle::independent_power(once) - 1.0));
      worst_pair = std::max(worst_pair, std::abs(oracle::independent_power(once) - once.power()));
    }
    r.pass = r.metric <= r.tolerance && worst_pair <= 1e-12;
    std::ostringstream os;
    os << "independent vs fast power " << worst_pair << " (tol 1e-12)";
    r.detail = os.str();
  }));

  out.push_back(detail::timed("Brillouin 2 pi wrap invariance" + tag, 1e-9, [&](CheckResult& r) {
    std::mt19937_64 krng(seed + 1);
    std::uniform_real_distribution<double> ku(-kPi, kPi);
    for (const auto& c : pool) {
      const auto& g = c.grid;
      for (int s = 0; s < 20; ++s) {
        const double ks = ku(krng), ki = ku(krng);
        const double ws = g.omega_s()[0], wi = g.omega_i()[g.omega_i().count - 1];
        const double a = delta_beta_A(ks, ki, ws, wi, c.model);
        for (const double shift : {kTwoPi, -kTwoPi, 2 * kTwoPi}) {
          const double b1 = delta_beta_A(ks + shift, ki, ws, wi, c.model);
          const double b2 = delta_beta_A(ks, ki - shift, ws, wi, c.model);
          const double scale = std::max(1.0, 4.0 * coupling_at_omega(std::min(ws, wi), c.model));
          r.metric = std::max({r.metric, std::abs(a - b1) / scale, std::abs(a - b2) / scale});
          const cplx p0 = pump_bloch_value(ks, c.pump), p1 = pump_bloch_value(ks + shift, c.pump);
          r.metric = std::max(r.metric, std::abs(p0 - p1) / std::max(1.0, std::abs(p0)));
        }
      }
    }
    r.pass = r.metric <= r.tolerance;
    r.detail = "delta_beta_A and Bloch amplitude, shifts of +-2 pi and 4 pi";
  }));

  out.push_back(detail::timed("per-photon propagation unitarity" + tag, 1e-9, [&](CheckResult& r) {
    std::mt19937_64 prng(seed + 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& c : pool) {
      const int n = c.geometry.channel_count;
      const double cpl = 10.0 + 800.0 * u(prng);
      for (const auto b : {oracle::Boundary::ring, oracle::Boundary::open}) {
        const oracle::Propagator prop(oracle::coupling_generator(n, cpl, b));
        const double z = -c.geometry.length * u(prng);
        const auto m = static_cast<Eigen::Index>(std::uniform_int_distribution<int>(0, n - 1)(prng));
        r.metric = std::max(r.metric, std::abs(prop.column(m, z).squaredNorm() - 1.0));
        const Eigen::MatrixXcd um = prop.matrix(z);
        r.metric = std::max(r.metric, (um.adjoint() * um - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff());
      }
    }
    r.pass = r.metric <= r.tolerance;
    r.detail = "ring and open chain";
  }));
  return out;
}

inline std::vector<CheckResult> run_all() {
  std::vector<CheckResult> out{check_phase_match_factor(), check_transform(), check_realspace()};
  for (auto& r : check_invariants()) out.push_back(std::move(r));
  return out;
}

}  // namespace wgapdc::verification
