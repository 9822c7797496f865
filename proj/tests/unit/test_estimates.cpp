#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rcm/errors.hpp"
#include "rcm/estimates.hpp"
#include "rcm/instances.hpp"

using namespace rcm;

TEST(Cutoff, ClosedFormTwoShellInstance) {
  const std::vector<double> f = {1.0, 4.0};
  const CutoffSolution s = optimal_cutoff(f, 1, 3);
  EXPECT_NEAR(s.energy, 0.8, 1e-15);
  ASSERT_EQ(s.profile.values.size(), 3u);
  EXPECT_DOUBLE_EQ(s.profile.values[0], 1.0);
  EXPECT_NEAR(s.profile.values[1], 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(s.profile.values[2], 0.0);
  EXPECT_TRUE(s.profile.admissible());
  // Grid search over the free value η̂(2).
  double best = kInfinity;
  for (int k = 0; k <= 100000; ++k) {
    CutoffProfile p = s.profile;
    p.values[1] = k / 100000.0;
    best = std::min(best, radial_energy(f, p));
  }
  EXPECT_NEAR(best, 0.8, 1e-6);
}

TEST(Cutoff, ZeroShellGivesZeroEnergy) {
  const std::vector<double> f = {2.0, 0.0, 5.0};
  EXPECT_EQ(optimal_cutoff(f, 0, 3).energy, 0.0);
}

TEST(Cutoff, RadialProfileReproducesShellEnergySum) {
  const Box box = Box::centered(3, 5);
  const ConductanceField omega(3, 21, LogNormalLaw{1.0});
  const ScalarField v = random_field(box, 4);
  const CutoffSolution s = optimal_cutoff(omega, v, Vertex::origin(3), 1, 4);
  const ScalarField eta = s.profile.field(box);
  // With both orientations counted in every shell, the lattice energy of the
  // radial cutoff equals the one-dimensional functional exactly.
  EXPECT_NEAR(cutoff_energy(omega, v, eta), s.energy, 1e-10 * s.energy);
}

TEST(Power, SpotValues) {
  EXPECT_TRUE(power_inequality_check(PowerInequality::kA1, 2.0, 2.0, 1.5, 0.5).passed);
  EXPECT_TRUE(power_inequality_check(PowerInequality::kA1, -3.0, 1.0, 0.3, -2.0).passed);
  EXPECT_TRUE(power_inequality_check(PowerInequality::kA2, 0.5, -4.0, 2.0).passed);
  EXPECT_TRUE(power_inequality_check(PowerInequality::kA3, 1.0, 9.0, 0.5).passed);
  EXPECT_THROW(power_inequality_check(PowerInequality::kA2, 1.0, 2.0, 0.5), ValidationError);
  EXPECT_THROW(power_inequality_check(PowerInequality::kA1, 1.0, 2.0, 0.0, 1.0), ValidationError);
}

TEST(Power, SmallAuditHasNoViolations) {
  for (PowerInequality k : {PowerInequality::kA1, PowerInequality::kA2, PowerInequality::kA3}) {
    const PowerAudit a = power_audit(k, 20000, 3);
    EXPECT_EQ(a.samples, 20000u);
    EXPECT_EQ(a.violations, 0u);
  }
}

TEST(Power, SignedPower) {
  EXPECT_DOUBLE_EQ(signed_power(-8.0, 1.0 / 3.0), -2.0);
  EXPECT_DOUBLE_EQ(signed_power(0.0, 2.5), 0.0);
  EXPECT_NEAR(signed_power(4.0, 1.5), 8.0, 1e-14);
}

TEST(LocalBoundedness, AffineFunctionInConstantMedium) {
  // u = x_1 is harmonic for ω ≡ 1, where Λ = 1; the ratio is
  // n / mean_{B(2n)} |x_1| = (4n + 1) / (2 (2n + 1)).
  const int d = 3;
  const ConductanceField omega(d, 1, ConstantLaw{1.0});
  const MomentProfile prof = MomentProfile::make(d, 4.0, 4.0);
  for (Coord n : {1, 2, 4}) {
    const ScalarField u = ScalarField::from_function(Box::centered(d, 2 * n + 1),
                                                     [](const Vertex& x) { return static_cast<double>(x[0]); });
    const BoundReport r = local_boundedness_ratio(omega, u, Vertex::origin(d), n, prof);
    const double nn = static_cast<double>(n);
    EXPECT_NEAR(r.ratio, (4.0 * nn + 1.0) / (2.0 * (2.0 * nn + 1.0)), 1e-12);
    EXPECT_NEAR(r.component("lambda"), 1.0, 1e-12);
    EXPECT_FALSE(r.calibrated());
    const auto [lhs, rhs] = recompute(r);
    EXPECT_NEAR(lhs, r.lhs, 1e-12 * r.lhs);
    EXPECT_NEAR(rhs, r.rhs, 1e-12 * r.rhs);
  }
}

TEST(LocalBoundedness, RejectsNonHarmonicInput) {
  const ConductanceField omega(3, 1, ConstantLaw{1.0});
  const MomentProfile prof = MomentProfile::make(3, 4.0, 4.0);
  const ScalarField u = ScalarField::from_function(Box::centered(3, 5), [](const Vertex& x) {
    return static_cast<double>(x[0] * x[0]);
  });
  EXPECT_THROW(local_boundedness_ratio(omega, u, Vertex::origin(3), 2, prof), PreconditionError);
  const ScalarField small(Box::centered(3, 3), 1.0);
  EXPECT_THROW(local_boundedness_ratio(omega, small, Vertex::origin(3), 2, prof), RegionError);
}

TEST(LocalBoundedness, CalibratedConstantDecides) {
  const ConductanceField omega(3, 1, ConstantLaw{1.0});
  const MomentProfile prof = MomentProfile::make(3, 4.0, 4.0);
  const ScalarField u = ScalarField::from_function(Box::centered(3, 5), [](const Vertex& x) {
    return static_cast<double>(x[1]);
  });
  EXPECT_TRUE(local_boundedness_ratio(omega, u, Vertex::origin(3), 2, prof, BoundednessForm::kTheorem, 1.0, 1.0).passed);
  EXPECT_FALSE(local_boundedness_ratio(omega, u, Vertex::origin(3), 2, prof, BoundednessForm::kTheorem, 1.0, 0.5).passed);
}

TEST(Energy, RandomInstancesSatisfyTheLiteralConstant) {
  const int d = 3;
  const Box box = Box::centered(d, 5);
  for (std::uint64_t k = 0; k < 6; ++k) {
    const HarmonicInstance inst = make_harmonic_instance(d, LogNormalLaw{1.0}, 50 + k, 60 + k, box);
    const ScalarField eta = random_cutoff(box, k);
    const BoundReport r = energy_estimate_check(inst.field, inst.solution.u, eta, 1.0 + 0.5 * static_cast<double>(k % 3));
    EXPECT_TRUE(r.passed) << r.ratio;
    EXPECT_EQ(r.constant, 1.0);
  }
}

TEST(Energy, CutoffMustVanishOnTheBoundary) {
  const Box box = Box::centered(2, 3);
  const HarmonicInstance inst = make_harmonic_instance(2, ConstantLaw{1.0}, 1, 2, box);
  const ScalarField eta(box, 1.0);
  EXPECT_THROW(energy_estimate_check(inst.field, inst.solution.u, eta, 1.0), ValidationError);
}

TEST(Sobolev, ConstantFunctionIsTrivial) {
  const ScalarField f(Box::centered(3, 4), 2.0);
  const BoundReport r = sobolev_bulk_check(f, Vertex::origin(3), 4, 1.0, 1.0);
  EXPECT_TRUE(r.trivial);
  EXPECT_TRUE(r.passed);
  EXPECT_THROW(sobolev_bulk_check(f, Vertex::origin(3), 4, 3.0), ValidationError);
  EXPECT_THROW(sobolev_sphere_check(f, Vertex::origin(3), 4, 2.0), ValidationError);
}

TEST(Sobolev, ReportsRecompose) {
  const ScalarField f = random_field(Box::centered(4, 3), 8);
  const BoundReport r = sobolev_sphere_check(f, Vertex::origin(4), 3, 2.0);
  const auto [lhs, rhs] = recompute(r);
  EXPECT_NEAR(lhs, r.lhs, 1e-12 * r.lhs);
  EXPECT_NEAR(rhs, r.rhs, 1e-12 * r.rhs);
}

TEST(Planar, PigeonholeAndMaximumPrinciple) {
  for (std::uint64_t k = 0; k < 5; ++k) {
    const Coord n = 4;
    const HarmonicInstance inst =
        make_harmonic_instance(2, TwoSidedParetoLaw{3.0, 3.0}, 200 + k, 300 + k, Box::centered(2, 2 * n + 1));
    const PlanarBound b = bound_2d(inst.field, inst.solution.u, Vertex::origin(2), n);
    EXPECT_TRUE(b.pigeonhole.passed);
    EXPECT_GE(b.good_layer, n);
    EXPECT_LE(b.good_layer, 2 * n);
    EXPECT_LE(b.max_principle_gap, 1e-9);
  }
}

TEST(Gradient, ConstantMediumAffineFunction) {
  const ConductanceField omega(3, 1, ConstantLaw{1.0});
  const MomentProfile prof = MomentProfile::make(3, 4.0, 4.0);
  const ScalarField u = ScalarField::from_function(Box::centered(3, 5), [](const Vertex& x) {
    return static_cast<double>(x[2]);
  });
  const BoundReport r = gradient_bound_check(omega, u, Vertex::origin(3), 2, 2, 4, prof);
  // |∇u| is 1 on a third of the bonds.
  const double s = 2.0 * 4.0 / 5.0;
  EXPECT_NEAR(r.lhs, std::pow(1.0 / 3.0, 1.0 / s), 1e-12);
  EXPECT_THROW(gradient_bound_check(omega, u, Vertex::origin(3), 2, 1, 4, prof), ValidationError);
}
