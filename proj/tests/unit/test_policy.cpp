#include <gtest/gtest.h>

#include <cmath>

#include "ccdispatch/policy.hpp"

namespace ccd {
namespace {

PolicyParams theta(PolicyKind k, double t1, double t2) {
  PolicyParams p;
  p.kind = k;
  p.theta1 = t1;
  p.theta2 = t2;
  return p;
}

PolicyParams alpha(double a1, double a2) {
  PolicyParams p;
  p.kind = PolicyKind::kCcAlphaExp;
  p.alpha1 = a1;
  p.alpha2 = a2;
  return p;
}

TEST(ThetaSchedule, ConstantOne) {
  const auto s = theta_schedule(theta(PolicyKind::kThetaConstant, 1.0, 0.0), 24);
  EXPECT_EQ(s.values, std::vector<double>(24, 1.0));
}

TEST(ThetaSchedule, ZeroDecay) {
  const auto s = theta_schedule(theta(PolicyKind::kThetaExp, 0.8, 0.0), 6);
  for (const double v : s.values) EXPECT_DOUBLE_EQ(v, 0.8);
}

TEST(ThetaSchedule, NegativeDecayGrows) {
  const auto s = theta_schedule(theta(PolicyKind::kThetaExp, 0.8, -std::log(1.25)), 3);
  EXPECT_NEAR(s.at_lead(1), 1.0, 1e-12);
  EXPECT_GT(s.at_lead(3), s.at_lead(2));
}

TEST(ThetaSchedule, Lookup) {
  PolicyParams p = theta(PolicyKind::kThetaLookup, 1, 0);
  p.lookup = {0.9, 1.0, 1.1};
  EXPECT_EQ(theta_schedule(p, 3).values, p.lookup);
  EXPECT_THROW((void)theta_schedule(p, 4), std::invalid_argument);
}

TEST(AlphaSchedule, ZeroDecay) {
  for (const double v : alpha_schedule(alpha(0.95, 0.0), 24).values) EXPECT_DOUBLE_EQ(v, 0.95);
}

TEST(AlphaSchedule, HalvesPerLead) {
  const auto s = alpha_schedule(alpha(0.95, std::log(2.0)), 3);
  EXPECT_NEAR(s.at_lead(1), 0.475, 1e-12);
  EXPECT_NEAR(s.at_lead(3), 0.11875, 1e-12);
}

TEST(AlphaSchedule, StaysInOpenInterval) {
  for (const double v : alpha_schedule(alpha(0.99, 5.0), 24).values) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(AlphaSchedule, MonotoneNonIncreasing) {
  for (const double a2 : {0.0, 0.01, 0.1, 1.0}) {
    const auto s = alpha_schedule(alpha(0.9, a2), 24);
    for (std::size_t l = 2; l <= 24; ++l) EXPECT_LE(s.at_lead(l), s.at_lead(l - 1));
  }
}

ForecastBundle bundle_with_wind(std::vector<double> mus) {
  ForecastBundle b;
  b.horizon = mus.size();
  for (const Series s : kAllSeries) b.at(s).assign(b.horizon, {10.0, 2.0});
  for (std::size_t l = 0; l < mus.size(); ++l) b.at(Series::e_w)[l] = {mus[l], 5.0};
  return b;
}

TEST(ApplyDlaTheta, OnesZeroSigmaOnly) {
  const ForecastBundle b = bundle_with_wind({100, 80});
  const ForecastBundle out = apply_dla_theta(b, LeadSchedule{{1.0, 1.0}});
  for (const Series s : kConstrainedSeries) {
    for (std::size_t l = 1; l <= 2; ++l) {
      EXPECT_EQ(out.marginal(s, l).mu, b.marginal(s, l).mu);
      EXPECT_EQ(out.marginal(s, l).sigma, 0.0);
    }
  }
  EXPECT_EQ(out.marginal(Series::p_eg, 1), b.marginal(Series::p_eg, 1));
}

TEST(ApplyDlaTheta, ScalesMeans) {
  const ForecastBundle out = apply_dla_theta(bundle_with_wind({100, 80}), LeadSchedule{{0.5, 0.5}});
  EXPECT_DOUBLE_EQ(out.marginal(Series::e_w, 1).mu, 50.0);
  EXPECT_DOUBLE_EQ(out.marginal(Series::e_w, 2).mu, 40.0);
}

TEST(ApplyDlaTheta, EmptySetIsIdentity) {
  const ForecastBundle b = bundle_with_wind({100, 80});
  EXPECT_EQ(apply_dla_theta(b, LeadSchedule{{0.5, 0.5}}, {}), b);
}

TEST(ApplyDlaTheta, LengthMismatch) {
  EXPECT_THROW((void)apply_dla_theta(bundle_with_wind({1, 2}), LeadSchedule{{1.0}}), std::invalid_argument);
}

TEST(TightenBound, Examples) {
  EXPECT_EQ(tighten_bound({100, 0}, 0.99), 100.0);
  EXPECT_EQ(tighten_bound({0, 1}, 0.5), 0.0);
  EXPECT_NEAR(tighten_bound({50, 10}, 0.97725), 30.0, 1e-3);
  EXPECT_NEAR(tighten_bound({50, 10}, 0.97725, BoundSense::kDemandUpper), 30.0, 1e-3);
}

TEST(TightenBound, SymmetricAroundMean) {
  for (const double a : {0.6, 0.8, 0.95, 0.999}) {
    const GaussianMarginal g{40.0, 7.0};
    EXPECT_NEAR(tighten_bound(g, a) - g.mu, g.mu - tighten_bound(g, 1.0 - a), 1e-9);
  }
}

TEST(TightenBound, TighterWithHigherAlpha) {
  double prev = 1e300;
  for (int k = 1; k < 100; ++k) {
    const double b = tighten_bound({100, 10}, k / 100.0);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(TightenBound, RejectsBadAlpha) {
  EXPECT_THROW((void)tighten_bound({0, 1}, 0.0), std::domain_error);
  EXPECT_THROW((void)tighten_bound({0, 1}, 1.0), std::domain_error);
}

TEST(ApplyPolicy, Dispatch) {
  const ForecastBundle b = bundle_with_wind({100, 80});
  const PolicyView mean = apply_policy(b, PolicyParams{});
  EXPECT_EQ(mean.bundle, b);
  EXPECT_FALSE(mean.alpha);

  const PolicyView th = apply_policy(b, theta(PolicyKind::kThetaConstant, 0.5, 0));
  EXPECT_DOUBLE_EQ(th.bundle.marginal(Series::e_w, 2).mu, 40.0);
  EXPECT_FALSE(th.alpha);

  const PolicyView cc = apply_policy(b, alpha(0.9, 0.0));
  EXPECT_EQ(cc.bundle, b);
  ASSERT_TRUE(cc.alpha);
  EXPECT_EQ(cc.alpha->size(), 2u);
}

TEST(PolicyParams, ValidateKeys) {
  try {
    alpha(1.5, 0).validate(24);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "alpha1");
  }
  PolicyParams p = theta(PolicyKind::kThetaLookup, 1, 0);
  p.lookup = {1.0};
  EXPECT_THROW(p.validate(24), ConfigError);
}

TEST(PolicyKind, ParseRoundTrip) {
  for (const auto k : {PolicyKind::kMean, PolicyKind::kThetaConstant, PolicyKind::kThetaLookup, PolicyKind::kThetaExp,
                       PolicyKind::kCcAlphaExp, PolicyKind::kCcAlphaLookup}) {
    EXPECT_EQ(parse_policy_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_policy_kind("bogus"));
}

}  // namespace
}  // namespace ccd
