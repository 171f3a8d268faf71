#include <gtest/gtest.h>

#include <random>

#include "wgapdc/dft.hpp"
#include "wgapdc/oracle.hpp"
#include "wgapdc/verification.hpp"

using namespace wgapdc;

TEST(Oracle, PmIntegralConverges) {
  const cplx exact = phase_match_factor(1234.5, 0.04);
  const double coarse = std::abs(oracle::pm_integral(1234.5, 0.04, 1000) - exact);
  const double fine = std::abs(oracle::pm_integral(1234.5, 0.04, 2000) - exact);
  EXPECT_NEAR(coarse / fine, 4.0, 0.05);
  EXPECT_LT(std::abs(oracle::pm_integral_richardson(1234.5, 0.04, 1000) - exact), 1e-10);
  EXPECT_THROW((void)oracle::pm_integral(1.0, 0.04, 10), PreconditionError);
}

TEST(Oracle, DirectTransformPair) {
  const Grid g = Grid::from_wavelengths(1500e-9, 1600e-9, 1, 9);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<cplx> x(81);
  for (auto& v : x) v = {d(rng), d(rng)};
  const ChannelTransform tr(g);
  const auto fast = tr.forward(x);
  const auto slow = oracle::direct_dft2(x, g);
  for (std::size_t j = 0; j < x.size(); ++j) EXPECT_LT(std::abs(fast[j] - slow[j]), 1e-12);
  const auto back = oracle::direct_idft2(slow, g);
  for (std::size_t j = 0; j < x.size(); ++j) EXPECT_LT(std::abs(back[j] - x[j]), 1e-12);
  const auto inv = tr.inverse(fast);
  for (std::size_t j = 0; j < x.size(); ++j) EXPECT_LT(std::abs(inv[j] - x[j]), 1e-12);
}

TEST(Oracle, PropagatorUnitaryAndMatchesBlochPhases) {
  const auto h = oracle::coupling_generator(11, 400.0, oracle::Boundary::ring);
  const oracle::Propagator p(h);
  const auto u = p.matrix(0.013);
  EXPECT_LT((u * u.adjoint() - Eigen::MatrixXcd::Identity(11, 11)).cwiseAbs().maxCoeff(), 1e-12);
  // ring eigenvalues are 2 C cos k
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  std::vector<double> expect;
  for (int j = 0; j < 11; ++j) expect.push_back(2 * 400.0 * std::cos(kTwoPi * j / 11));
  std::sort(expect.begin(), expect.end());
  for (int j = 0; j < 11; ++j) EXPECT_NEAR(es.eigenvalues()(j), expect[static_cast<std::size_t>(j)], 1e-9);
}

TEST(Oracle, RealspaceRejectsBadInput) {
  oracle::PropagationProblem p;
  p.channel_count = 1;
  EXPECT_THROW((void)oracle::realspace_pair_amplitude(p), PreconditionError);
  p.channel_count = 9;
  p.pump_channels = {{7, cplx{1.0, 0.0}}};
  EXPECT_THROW((void)oracle::realspace_pair_amplitude(p), PreconditionError);
}

TEST(Oracle, RealspaceReportsNonConvergence) {
  oracle::PropagationProblem p;
  p.channel_count = 9;
  p.z_steps = 1000;
  p.beta_mismatch = 3000.0;
  EXPECT_THROW((void)oracle::realspace_pair_amplitude(p), ConvergenceError);
}

TEST(Oracle, RealspaceMatchesFastPathSmall) {
  const auto r = verification::check_realspace(400.0, 15, 20000);
  EXPECT_TRUE(r.pass) << r.metric << " " << r.detail;
}

TEST(Verification, PhaseMatchAndTransformSuites) {
  const auto a = verification::check_phase_match_factor(100, 100000);
  EXPECT_TRUE(a.pass) << a.metric;
  const auto b = verification::check_transform(100);
  EXPECT_TRUE(b.pass) << b.metric;
}

TEST(Verification, InvariantSuite) {
  for (const auto& r : verification::check_invariants(100)) EXPECT_TRUE(r.pass) << r.name << " " << r.metric << " " << r.detail;
}
