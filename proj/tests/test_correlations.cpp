#include <gtest/gtest.h>

#include <numeric>

#include "support.hpp"
#include "wgapdc/correlations.hpp"
#include "wgapdc/oracle.hpp"
#include "wgapdc/pipeline.hpp"

using namespace wgapdc;
using wgapdc::testing::small_case;

namespace {

double total(const Array2<double>& m) { return std::accumulate(m.data().begin(), m.data().end(), 0.0); }

}  // namespace

TEST(GammaKOmega, DiagonalFactor) {
  const auto t = normalize(wgapdc::testing::build(small_case()));
  const auto gko = gamma_k_omega(t);
  const auto& g = t.grid();
  const std::size_t n = g.nk();
  for (std::size_t is = 0; is < g.omega_s().count; ++is)
    for (std::size_t ii = 0; ii < g.omega_i().count; ++ii)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          const std::size_t j = t.slice_offset(is, ii) + a * n + b;
          const double f2 = std::norm(t.values()[j]);
          ASSERT_EQ(gko[j], (is == ii && a == b) ? 4.0 * f2 : f2);
        }
}

TEST(GammaKOmega, RequiresNormalized) {
  const auto t = wgapdc::testing::build(small_case());
  EXPECT_THROW((void)gamma_k_omega(t), ContractError);
  EXPECT_THROW((void)correlation_maps(t), ContractError);
  EXPECT_THROW((void)spatio_spectral_intensity(t), ContractError);
}

TEST(CorrelationMaps, NonNegativeSymmetricParseval) {
  const auto t = normalize(wgapdc::testing::build(small_case(11)));
  const auto m = correlation_maps(t);
  for (double v : m.gamma_k.data()) EXPECT_GE(v, 0.0);
  for (double v : m.gamma_n.data()) EXPECT_GE(v, 0.0);
  const std::size_t n = m.gamma_n.rows();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) EXPECT_NEAR(m.gamma_n(a, b), m.gamma_n(b, a), 1e-15);
  EXPECT_NEAR(total(m.gamma_k) - m.diagonal_excess_k, total(m.gamma_n) - m.diagonal_excess_n,
              1e-9 * total(m.gamma_k));
  EXPECT_EQ(m.channel_axis.size(), n);
}

TEST(CorrelationMaps, MatchesDirectTransformOracle) {
  const auto t = normalize(wgapdc::testing::build(small_case(7, 9, 4.0)));
  const auto m = correlation_maps(t);
  const auto& g = t.grid();
  const std::size_t n = g.nk();
  Array2<double> gn(n, n);
  for (std::size_t is = 0; is < g.omega_s().count; ++is)
    for (std::size_t ii = 0; ii < g.omega_i().count; ++ii) {
      const auto s = t.slice(is, ii);
      const auto ns = oracle::direct_dft2({s.begin(), s.end()}, g);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          gn(a, b) += (is == ii && a == b ? 4.0 : 1.0) * std::norm(ns[a * n + b]) * g.cell_measure();
    }
  for (std::size_t j = 0; j < gn.size(); ++j) EXPECT_NEAR(m.gamma_n.data()[j], gn.data()[j], 1e-12 * total(gn));
}

TEST(CorrelationMaps, BandedEqualsDense) {
  const auto c = small_case(9, 41, 12.0);
  const BandedJsa banded(c.grid, c.geometry, c.pump, c.model, std::nullopt, 60.0);
  const auto a = correlation_maps(banded);
  const auto b = correlation_maps(normalize(wgapdc::testing::build(c)));
  for (std::size_t j = 0; j < a.gamma_n.size(); ++j) EXPECT_NEAR(a.gamma_n.data()[j], b.gamma_n.data()[j], 1e-12);
}

TEST(CorrelationMaps, Deterministic) {
  const auto c = small_case(9, 41, 12.0);
  const BandedJsa banded(c.grid, c.geometry, c.pump, c.model);
  const auto a = correlation_maps(banded);
  const auto b = correlation_maps(banded);
  EXPECT_EQ(a.gamma_n, b.gamma_n);
  EXPECT_EQ(a.gamma_k, b.gamma_k);
}

TEST(ChunkedReduce, ThreadCountDoesNotChangeResult) {
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / (1.0 + static_cast<double>(i * i));
  auto run = [&](unsigned threads) {
    return chunked_reduce<double>(
        xs.size(), 7, [] { return 0.0; },
        [&](std::size_t b, std::size_t e, double& p) {
          for (std::size_t i = b; i < e; ++i) p += xs[i];
        },
        [](double& t, double p) { t += p; }, threads);
  };
  const double one = run(1);
  for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(run(t), one);
}

TEST(ChunkedReduce, PropagatesExceptions) {
  auto bad = [] {
    return chunked_reduce<int>(
        100, 3, [] { return 0; },
        [](std::size_t b, std::size_t, int&) {
          if (b == 42) throw DomainError("boom");
        },
        [](int&, int) {}, 4);
  };
  EXPECT_THROW(bad(), DomainError);
}

TEST(GammaN, LinearPhaseShiftsMap) {
  auto c = small_case(15, 9, 4.0);
  c.pump.spatial = KWindowPump{0.0, kPi / 2, {0.0, 0.0, 0.0}};
  const auto base = gamma_n(normalize(wgapdc::testing::build(c)));
  for (int slope : {1, 3, -2}) {
    c.pump.spatial = KWindowPump{0.0, kPi / 2, {0.0, static_cast<double>(slope), 0.0}};
    const auto moved = gamma_n(normalize(wgapdc::testing::build(c)));
    const auto expect = circular_shift(base, -slope);
    double worst = 0.0;
    for (std::size_t j = 0; j < moved.size(); ++j) worst = std::max(worst, std::abs(moved.data()[j] - expect.data()[j]));
    EXPECT_LT(worst, 1e-9) << slope;
  }
}

TEST(SpatioSpectral, MassIsTwoAndMarginalsPartition) {
  const auto t = normalize(wgapdc::testing::build(small_case(9, 41, 12.0)));
  const auto map = spatio_spectral_intensity(t);
  EXPECT_TRUE(std::is_sorted(map.wavelength.begin(), map.wavelength.end()));
  for (double v : map.intensity.data()) EXPECT_GE(v, 0.0);
  const auto maps = correlation_maps(t);
  EXPECT_NEAR(map.mass(), 2.0 * (total(maps.gamma_n) - maps.diagonal_excess_n), 1e-12);
  double from_marginals = 0.0;
  for (int ch : map.channels) {
    const auto row = spectral_marginal(map, ch);
    for (std::size_t c = 0; c < row.size(); ++c) from_marginals += row[c] * map.cell_width[c];
  }
  EXPECT_NEAR(from_marginals, map.mass(), 1e-12);
  EXPECT_THROW((void)spectral_marginal(map, 5), PreconditionError);
}

TEST(SpatioSpectral, FullBandMarginalSymmetric) {
  const auto t = normalize(wgapdc::testing::build(small_case(11, 41, 12.0)));
  const auto map = spatio_spectral_intensity(t);
  const auto m = spatial_marginal(map, map.wavelength.front(), map.wavelength.back());
  EXPECT_DOUBLE_EQ(m[map.channel_row(0)], 1.0);
  for (int ch = 1; ch <= 5; ++ch)
    EXPECT_NEAR(m[map.channel_row(ch)], m[map.channel_row(-ch)], 1e-6 * m[map.channel_row(ch)] + 1e-15);
  EXPECT_THROW((void)spatial_marginal(map, 1e-6, 1.1e-6), EmptyStateError);
  EXPECT_THROW((void)spatial_marginal(map, 2e-6, 1e-6), PreconditionError);
}

TEST(SpatioSpectral, SmoothingPreservesMass) {
  const auto t = normalize(wgapdc::testing::build(small_case(9, 41, 12.0)));
  const auto map = spatio_spectral_intensity(t);
  const auto s = smooth_spectral(map, 2e-9);
  EXPECT_NEAR(s.mass(), map.mass(), 1e-12);
  EXPECT_THROW((void)smooth_spectral(map, 0.0), PreconditionError);
}

TEST(Metrics, SpreadAndFwhm) {
  const std::vector<double> p{0.01, 0.04, 0.2, 1.0, 0.2, 0.06, 0.01};
  EXPECT_EQ(spread_count(p, 3, 0.05), 4);
  std::vector<double> x(201), y(201);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<double>(i) - 100.0;
    y[i] = std::exp(-x[i] * x[i] / (2 * 20.0 * 20.0));
  }
  EXPECT_NEAR(*fwhm(x, y), 2 * std::sqrt(2 * std::log(2.0)) * 20.0, 0.05);
  EXPECT_FALSE(fwhm(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 1}).has_value());
}

TEST(Metrics, PeaksAndBranches) {
  std::vector<double> l, y;
  for (int i = 0; i <= 500; ++i) {
    const double lam = (1300.0 + i) * 1e-9;
    l.push_back(lam);
    const double a = (lam - 1430e-9) / 8e-9, b = (lam - 1671e-9) / 8e-9;
    y.push_back(std::exp(-a * a / 2) + 0.8 * std::exp(-b * b / 2));
  }
  EXPECT_EQ(significant_peaks(y).size(), 2u);
  EXPECT_TRUE(is_bimodal(y));
  const auto br = find_branches(l, y, 773.9e-9);
  EXPECT_FALSE(br.degenerate);
  EXPECT_NEAR(*br.lambda_s, 1430e-9, 0.1e-9);
  EXPECT_NEAR(*br.lambda_i, 1671e-9, 0.1e-9);
  EXPECT_GT(br.separation(), 0.0);

  std::vector<double> single;
  for (double lam : l) {
    const double a = (lam - 1549.8e-9) / 40e-9;
    single.push_back(std::exp(-a * a / 2));
  }
  EXPECT_FALSE(is_bimodal(single));
  const auto d = find_branches(l, single, 774.9e-9);
  EXPECT_TRUE(d.degenerate);
  EXPECT_NEAR(*d.lambda_s, 1549.8e-9, 2e-9);
  EXPECT_EQ(d.separation(), 0.0);
}

TEST(Metrics, PlateauCountsOnce) {
  EXPECT_EQ(significant_peaks(std::vector<double>{0, 1, 1, 1, 0}).size(), 1u);
  EXPECT_EQ(significant_peaks(std::vector<double>{0, 1, 0.9, 1, 0}).size(), 2u);
}
