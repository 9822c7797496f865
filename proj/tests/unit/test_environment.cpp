#include <gtest/gtest.h>

#include <cmath>

#include "rcm/environment.hpp"
#include "rcm/errors.hpp"

using namespace rcm;

TEST(Laws, ValidateRejectsBadParameters) {
  EXPECT_THROW(validate(ConstantLaw{0.0}), ValidationError);
  EXPECT_THROW(validate(UniformEllipticLaw{1.5}), ValidationError);
  EXPECT_THROW(validate(UniformEllipticLaw{0.0}), ValidationError);
  EXPECT_THROW(validate(LogNormalLaw{-1.0}), ValidationError);
  EXPECT_THROW(validate(TwoSidedParetoLaw{0.0, 2.0}), ValidationError);
  EXPECT_NO_THROW(validate(TwoSidedParetoLaw{8.0, 8.0}));
}

TEST(Laws, QuantilesStayInSupport) {
  for (double u : {1e-9, 0.25, 0.5, 0.75, 1.0 - 1e-9}) {
    const double v = inverse_cdf(UniformEllipticLaw{0.5}, u);
    EXPECT_GE(v, 0.5);
    EXPECT_LE(v, 2.0);
    EXPECT_GT(inverse_cdf(TwoSidedParetoLaw{3.0, 3.0}, u), 0.0);
  }
  EXPECT_DOUBLE_EQ(inverse_cdf(ConstantLaw{2.5}, 0.3), 2.5);
}

TEST(Laws, ParetoMomentsMatchEmpiricalAverages) {
  const TwoSidedParetoLaw law{8.0, 8.0};
  const ConductanceField field(3, 123, law);
  const Box box = Box::centered(3, 20);
  double m2 = 0.0;
  double im2 = 0.0;
  std::size_t count = 0;
  box.for_each_bond([&](const Bond& e) {
    const double w = field(e);
    m2 += w * w;
    im2 += 1.0 / (w * w);
    ++count;
  });
  m2 /= static_cast<double>(count);
  im2 /= static_cast<double>(count);
  EXPECT_NEAR(m2, analytic_moment(law, 2.0), 0.02 * analytic_moment(law, 2.0));
  EXPECT_NEAR(im2, analytic_moment(law, -2.0), 0.02 * analytic_moment(law, -2.0));
  EXPECT_TRUE(std::isinf(analytic_moment(law, 8.0)));
}

TEST(Laws, LogNormalMoment) {
  EXPECT_NEAR(analytic_moment(LogNormalLaw{0.5}, 2.0), std::exp(0.5 * 4.0 * 0.25), 1e-12);
}

TEST(Hashing, FieldIsDeterministicAndSeedDependent) {
  const ConductanceField a(3, 42, LogNormalLaw{1.0});
  const ConductanceField b(3, 42, LogNormalLaw{1.0});
  const ConductanceField c(3, 43, LogNormalLaw{1.0});
  int differ = 0;
  Box::centered(3, 2).for_each_bond([&](const Bond& e) {
    EXPECT_EQ(a(e), b(e));
    differ += a(e) != c(e) ? 1 : 0;
  });
  EXPECT_GT(differ, 0);
  EXPECT_NE(bond_hash(1, Vertex{0, 0}, 0), bond_hash(1, Vertex{0, 0}, 1));
  const double u = hash_to_unit(mix64(5));
  EXPECT_GT(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(Hashing, TorusFieldIsPeriodic) {
  const Coord L = 5;
  const ConductanceField f(2, 9, UniformEllipticLaw{0.3}, TorusGeometry{L});
  Box::centered(2, 3).for_each_bond([&](const Bond& e) {
    EXPECT_EQ(f(e), f.conductance(e.lower.shifted(0, L), e.direction));
    EXPECT_EQ(f(e), f.conductance(e.lower.shifted(1, -2 * L), e.direction));
  });
}

TEST(Moments, AdmissibilityAndDerivedExponents) {
  const MomentCheck bad = check_moment_condition(3, 2.0, 2.0);
  EXPECT_FALSE(bad.admissible);
  EXPECT_NE(bad.violation.find("1/p + 1/q < 2/(d-1)"), std::string::npos);
  const MomentProfile p = MomentProfile::make(3, 4.0, 4.0);
  EXPECT_DOUBLE_EQ(p.delta, 0.25);
  EXPECT_DOUBLE_EQ(p.p_prime, 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.chi_exp, 1.25);
  EXPECT_THROW(MomentProfile::make(3, 2.0, 2.0), ValidationError);
  EXPECT_THROW(check_moment_condition(3, 1.0, 4.0), ValidationError);
  EXPECT_TRUE(check_moment_condition(4, kInfinity, kInfinity).admissible);
}

TEST(Moments, ConstantEnvironmentHasUnitContrast) {
  const ConductanceField f(3, 1, ConstantLaw{3.0});
  EXPECT_NEAR(lambda_contrast(f, Box::centered(3, 2), 4.0, 4.0), 1.0, 1e-14);
}

TEST(Moments, MuAndNuCountIncidentBonds) {
  TableMedium m(2, 1.0);
  m.set(Bond{Vertex{0, 0}, 0}, 3.0);
  EXPECT_DOUBLE_EQ(mu(m, Vertex{0, 0}), 6.0);
  EXPECT_DOUBLE_EQ(nu(m, Vertex{0, 0}), 3.0 + 1.0 / 3.0);
}

TEST(Export, ConductanceCsvHasOneRowPerBond) {
  std::ostringstream os;
  const ConductanceField f(2, 3, ConstantLaw{1.0});
  write_conductance_csv(os, f, Box::centered(2, 1));
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "lower_1,lower_2,direction,value");
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), 1u + 12u);
}
