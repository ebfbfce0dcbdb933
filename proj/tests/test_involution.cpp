#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "qfock/involution.hpp"

using namespace qfock;

namespace {

GammaMap make_gamma(double q) {
  return GammaMap(std::make_shared<const CdfModel>(DensityModel(QContext(q))));
}

}  // namespace

class GammaTest : public ::testing::TestWithParam<double> {
 protected:
  GammaMap g = make_gamma(GetParam());
  double L = g.context().support();
};

TEST_P(GammaTest, BoundaryValuesAndConvention) {
  EXPECT_EQ(g(L), 0.0);
  EXPECT_EQ(g(-L), 0.0);
  EXPECT_EQ(g(0.0), 0.0);
  EXPECT_THROW(g(L * 1.001), std::domain_error);
}

TEST_P(GammaTest, FixedPointSitsAtThreeQuarters) {
  const double xs = g.fixed_point();
  EXPECT_NEAR(g.cdf().cdf(xs), 0.75, 1e-12);
  EXPECT_NEAR(g(xs), xs, 1e-9);
}

TEST_P(GammaTest, InvolutionOddnessMonotonicity) {
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = -L + (i + 0.5) * L / 100.0;
    const double y = g(x);
    EXPECT_NEAR(g(y), x, 1e-6);
    EXPECT_NEAR(y, -g(-x), 1e-8);
    if (i != 0 && i != 100) {
      EXPECT_LT(y, prev) << x;
    }
    prev = y;
    EXPECT_TRUE(x > 0 ? (y >= 0 && y <= L) : (y <= 0 && y >= -L));
  }
}

TEST_P(GammaTest, MeasurePreservationOnIntervals) {
  const auto& F = g.cdf();
  for (double a = 0.05; a < 0.9; a += 0.1) {
    const double lo = a * L, hi = (a + 0.07) * L;
    EXPECT_NEAR(F.cdf(hi) - F.cdf(lo), F.cdf(g(lo)) - F.cdf(g(hi)), 2e-10);
  }
}

TEST_P(GammaTest, JumpAtZeroReachesTheEnds) {
  const double eps = 1e-6 * L;
  const double mass = g.cdf().central_mass(eps);
  EXPECT_LE(1.0 - g.cdf().cdf(g(eps)), 2.0 * mass);
  EXPECT_LE(g.cdf().cdf(g(-eps)), 2.0 * mass);
  EXPECT_GT(g(eps), g(0.1 * L));
}

TEST_P(GammaTest, PushforwardPreservesMoments) {
  const auto rep = check_pushforward(g, 8);
  ASSERT_EQ(rep.rows.size(), 8u);
  EXPECT_NEAR(rep.rows[0].gamma_moment, 0.0, 1e-12);
  EXPECT_NEAR(rep.rows[1].gamma_moment, 1.0, 1e-7);
  EXPECT_NEAR(rep.rows[3].gamma_moment, 2.0 + GetParam(), 1e-7);
  EXPECT_LT(rep.max_abs_discrepancy, 1e-7);
}

INSTANTIATE_TEST_SUITE_P(QGrid, GammaTest, ::testing::Values(0.1, 0.5, 0.9));

TEST(OdeResidual, SmallAtHalfSupportAndFixedPoint) {
  const GammaMap g = make_gamma(0.5);
  const double L = g.context().support();
  EXPECT_LT(std::abs(ode_residual(L / 2, g, 1e-4)), 1e-5);
  const double xs = g.fixed_point();
  EXPECT_LT(std::abs(ode_residual(xs, g, 1e-4)), 1e-5);
  // gamma'(x*) = -1
  const double slope = (g(xs + 1e-5) - g(xs - 1e-5)) / 2e-5;
  EXPECT_NEAR(slope, -1.0, 1e-6);
}

TEST(OdeResidual, CentralDifferenceIsSecondOrder) {
  const GammaMap g = make_gamma(0.5);
  const double x = 0.3 * g.context().support();
  const double r1 = std::abs(ode_residual(x, g, 0.04));
  const double r2 = std::abs(ode_residual(x, g, 0.02));
  EXPECT_NEAR(r1 / r2, 4.0, 0.2);
}

TEST(OdeResidual, RejectsStepsAcrossZeroOrEnds) {
  const GammaMap g = make_gamma(0.5);
  const double L = g.context().support();
  EXPECT_THROW(ode_residual(0.01, g, 0.02), std::domain_error);
  EXPECT_THROW(ode_residual(L - 0.01, g, 0.02), std::domain_error);
}

TEST(MassRule, NodesMirrorUnderGamma) {
  const GammaMap g = make_gamma(0.7);
  const MassRule rule = mass_rule(g, 24);
  double w = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    w += rule.weights[i];
    EXPECT_NEAR(rule.gamma[i], g(rule.x[i]), 1e-10 * g.context().support());
  }
  EXPECT_NEAR(w, 1.0, 1e-13);
  EXPECT_GE(rule.size(), 200u);
}
