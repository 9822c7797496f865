#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "rcm/diagnostics.hpp"
#include "rcm/errors.hpp"

using namespace rcm;

TEST(Sublinearity, ZeroCorrectorGivesZeroCurve) {
  const Torus t(2, 16);
  const std::vector<PeriodicField> chi = {PeriodicField(t), PeriodicField(t)};
  const SublinearityCurve c = sublinearity_curve(chi, {2, 4, 8});
  ASSERT_EQ(c.size(), 3u);
  for (const SublinearityPoint& p : c) {
    EXPECT_EQ(p.linf, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(p.l1, (std::vector<double>{0.0, 0.0}));
  }
  EXPECT_THROW(sublinearity_curve(chi, {4, 2}), ValidationError);
  EXPECT_THROW(sublinearity_curve(chi, {9}), ValidationError);
}

TEST(Sublinearity, KnownField) {
  const Torus t(1, 8);
  const std::vector<PeriodicField> chi = {PeriodicField(t, {0.0, 1.0, -2.0, 0.0, 0.0, 0.0, 0.0, 3.0})};
  const SublinearityCurve c = sublinearity_curve(chi, {1, 2});
  EXPECT_DOUBLE_EQ(c[0].linf[0], 3.0);        // max over {-1, 0, 1}
  EXPECT_DOUBLE_EQ(c[0].l1[0], 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(c[1].linf[0], 3.0 / 2.0);  // max over {-2..2} = 3
}

TEST(Iota, AverageEqualsEffectiveDiffusivity) {
  const ConductanceField f(2, 3, LogNormalLaw{1.0}, TorusGeometry{12});
  const TorusConductances omega = TorusConductances::sample(f, 12);
  SolverOptions o;
  o.tol = 1e-13;
  const CorrectorBundle b = solve_correctors(omega, o);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(iota_average(omega, b.chi, j), b.sigma2(j, j), 1e-10);
}

TEST(Covariance, ComparisonOnExactSamples) {
  // Symmetric ±1 samples in each coordinate: second moment matrix = I.
  std::vector<std::vector<double>> s;
  for (int a : {-1, 1}) {
    for (int b : {-1, 1}) s.push_back({static_cast<double>(a), static_cast<double>(b)});
  }
  const CovarianceComparison c = compare_covariance(s, Eigen::MatrixXd::Identity(2, 2), 0.1, 5.0);
  EXPECT_TRUE(c.ok());
  EXPECT_NEAR(c.empirical(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(c.empirical(0, 1), 0.0, 1e-15);
  const CovarianceComparison bad = compare_covariance(s, 2.0 * Eigen::MatrixXd::Identity(2, 2), 0.1, 5.0);
  EXPECT_FALSE(bad.diagonal_ok);
}

TEST(Ks, GaussianQuantilesScoreLow) {
  const boost::math::normal_distribution<double> nd(0.0, 2.0);
  std::vector<double> samples;
  const int N = 4000;
  for (int k = 0; k < N; ++k) samples.push_back(boost::math::quantile(nd, (k + 0.5) / N));
  EXPECT_LT(lattice_ks_statistic(samples, 4.0, 0.0), 0.05);
  EXPECT_GT(lattice_ks_statistic(samples, 16.0, 0.0), 1.0);
}

TEST(Qfclt, ConstantMediumWalkEqualsMartingale) {
  const ConductanceField f(2, 1, ConstantLaw{1.0}, TorusGeometry{8});
  const TorusConductances omega = TorusConductances::sample(f, 8);
  const CorrectorBundle b = solve_correctors(omega);
  QfcltOptions o;
  o.n = 4;
  o.replicas = 400;
  o.seed = 5;
  const QfcltReport r = qfclt_test(omega, b, o);
  EXPECT_EQ(r.walk.empirical, r.martingale.empirical);
  EXPECT_EQ(r.dominance_violations, 0u);
  EXPECT_EQ(r.remainder_max, 0.0);
  EXPECT_DOUBLE_EQ(r.target_scale, 1.0);
  o.mode = WalkMode::kConstantSpeed;
  EXPECT_DOUBLE_EQ(qfclt_test(omega, b, o).target_scale, 0.25);
}

TEST(Qfclt, ThreadCountDoesNotChangeResults) {
  const ConductanceField f(2, 2, LogNormalLaw{0.5}, TorusGeometry{8});
  const TorusConductances omega = TorusConductances::sample(f, 8);
  const CorrectorBundle b = solve_correctors(omega);
  QfcltOptions o;
  o.n = 4;
  o.replicas = 300;
  const QfcltReport one = qfclt_test(omega, b, o);
  o.threads = 3;
  const QfcltReport three = qfclt_test(omega, b, o);
  EXPECT_EQ(one.walk.empirical, three.walk.empirical);
  EXPECT_EQ(one.total_jumps, three.total_jumps);
}

TEST(Multiscale, RequiresCompatibleScales) {
  const ConductanceField f(3, 2, ConstantLaw{1.0}, TorusGeometry{8});
  const TorusConductances omega = TorusConductances::sample(f, 8);
  const PeriodicField chi(omega.torus());
  const MomentProfile prof = MomentProfile::make(3, 4.0, 4.0);
  EXPECT_THROW(multiscale_bound_estimate(omega, chi, 5, 2, prof), ValidationError);
  const BoundReport r = multiscale_bound_estimate(omega, chi, 6, 2, prof);
  EXPECT_TRUE(r.trivial);
}
