#include <gtest/gtest.h>

#include <cmath>

#include "zinbspc/calibrate.hpp"
#include "zinbspc/error.hpp"

using namespace zinbspc;

namespace {

CalibrationSpec spec_for(double lambda, int n = 1) {
  CalibrationSpec spec;
  spec.lambda = lambda;
  spec.n = n;
  spec.params = {1.0, 0.4, 0.85};
  return spec;
}

}  // namespace

TEST(ShewhartExact, GeometricOracle) {
  const ZinbParams p{1.0, 0.4, 0.85};
  EXPECT_NEAR(shewhart_arl_exact(p, 7.9988), 1.0 / (0.15 * std::pow(0.6, 8)), 1e-9);
  EXPECT_NEAR(shewhart_arl_exact(p, 7.9988), 396.9, 0.1);
  EXPECT_EQ(shewhart_arl_exact(p, -1.0), 1.0);
  EXPECT_NEAR(shewhart_arl_exact({1.0, 0.38, 0.85}, 7.9988), 305.3, 0.1);
}

TEST(ShewhartExact, SubgroupOfOneMatchesDefault) {
  const ZinbParams p{2.0, 0.35, 0.6};
  for (double u : {0.0, 1.5, 4.0, 9.99}) {
    EXPECT_NEAR(shewhart_arl_exact(p, u, 1) / shewhart_arl_exact(p, u), 1.0, 1e-9);
  }
}

TEST(ShewhartExact, SubgroupMeanOfGeometricCase) {
  // With theta = 0 and k = 1 the subgroup sum is NB(n, p).
  const ZinbParams p{1.0, 0.4, 0.0};
  const int n = 5;
  const double ucl = 2.3;  // sum > 11.5 means sum >= 12
  double cdf = 0.0;
  for (int s = 0; s <= 11; ++s) {
    cdf += std::exp(std::lgamma(s + n) - std::lgamma(n) - std::lgamma(s + 1.0) + n * std::log(0.4) +
                    s * std::log(0.6));
  }
  EXPECT_NEAR(shewhart_arl_exact(p, ucl, n), 1.0 / (1.0 - cdf), 1e-8);
}

TEST(CalibrateL, EwmaDesign) {
  const auto r = calibrate_L(spec_for(0.05));
  EXPECT_NEAR(r.l_star, 3.105, 0.1);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.achieved_arl, 500.0, spec_for(0.05).tolerance());
  EXPECT_GE(r.l_star, 0.5);
}

TEST(CalibrateL, SubgroupDesign) {
  auto spec = spec_for(0.10, 10);
  spec.reps = 5000;
  const auto r = calibrate_L(spec);
  EXPECT_NEAR(r.l_star, 3.083, 0.1);
}

TEST(CalibrateL, UnreachableTarget) {
  auto spec = spec_for(0.1);
  spec.target_arl0 = 1.0;
  EXPECT_THROW(calibrate_L(spec), DomainError);
  // Just above one: every chart with L >= 1e-3 has a larger ARL.
  spec.target_arl0 = 1.001;
  spec.reps = 500;
  try {
    const auto r = calibrate_L(spec);
    EXPECT_GT(r.achieved_arl, 1.0);
  } catch (const BracketError&) {
    SUCCEED();
  }
}

TEST(CalibrateL, ShewhartMonteCarloMatchesExactAtResult) {
  auto spec = spec_for(1.0);
  spec.params = {5.0, 0.4, 0.85};
  spec.reps = 4000;
  const auto r = calibrate_L(spec);
  const double exact = shewhart_arl_exact(spec.params, r.ucl);
  EXPECT_NEAR(r.achieved_arl, exact, 4.0 * r.summary.se_arl);
}

TEST(CalibrateShewhart, PlateauReported) {
  const auto r = calibrate_shewhart_exact(spec_for(1.0));
  ASSERT_TRUE(r.plateau.has_value());
  EXPECT_LT(r.plateau->arl_below, 500.0);
  EXPECT_GT(r.plateau->arl_above, 500.0);
  EXPECT_NEAR(r.plateau->arl_below, 396.9, 0.1);
  EXPECT_NEAR(r.achieved_arl, 396.9, 0.1);  // nearest step
  // The published L = 8.435 lies inside the selected L interval.
  EXPECT_LT(r.plateau->l_below, 8.435 + 1.0);
}

TEST(CalibrateShewhart, Policies) {
  auto spec = spec_for(1.0);
  spec.plateau_policy = PlateauPolicy::Above;
  const auto above = calibrate_shewhart_exact(spec);
  spec.plateau_policy = PlateauPolicy::Below;
  const auto below = calibrate_shewhart_exact(spec);
  EXPECT_GT(above.achieved_arl, 500.0);
  EXPECT_LT(below.achieved_arl, 500.0);
  EXPECT_GT(above.l_star, below.l_star);
  EXPECT_NEAR(shewhart_arl_exact(spec.params, above.ucl), above.achieved_arl, 1e-9);
}

TEST(CalibrationSpec, Validation) {
  auto spec = spec_for(0.1);
  spec.l_lo = 5.0;
  spec.l_hi = 4.0;
  EXPECT_THROW(spec.validate(), DomainError);
  spec = spec_for(0.1);
  spec.target_arl0 = 0.5;
  EXPECT_THROW(spec.validate(), DomainError);
  EXPECT_DOUBLE_EQ(spec_for(0.1).tolerance(), 5.0);
}
