#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ccdispatch/forecast.hpp"

namespace ccd {
namespace {

// Bisection on the erf-based CDF, independent of the library's inverse.
double bisect_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(Quantile, Median) { EXPECT_EQ(quantile({0.0, 1.0}, 0.5), 0.0); }

TEST(Quantile, ZeroSpread) { EXPECT_EQ(quantile({7.0, 0.0}, 0.123), 7.0); }

TEST(Quantile, NinetySevenPointFive) { EXPECT_NEAR(quantile({0.0, 1.0}, 0.975), 1.959964, 1e-5); }

TEST(Quantile, MatchesBisectionOracle) {
  for (const double p : {1e-9, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.999, 1 - 1e-6}) {
    EXPECT_NEAR(quantile({0.0, 1.0}, p), bisect_quantile(p), 1e-8 * (1 + std::fabs(bisect_quantile(p)))) << p;
  }
}

TEST(Quantile, MonotoneInP) {
  double prev = -1e300;
  for (int k = 1; k < 1000; ++k) {
    const double q = quantile({3.0, 2.0}, k / 1000.0);
    EXPECT_GT(q, prev);
    prev = q;
  }
}

TEST(Quantile, RejectsBadInput) {
  EXPECT_THROW((void)quantile({0, 1}, 0.0), std::domain_error);
  EXPECT_THROW((void)quantile({0, 1}, 1.0), std::domain_error);
  EXPECT_THROW((void)quantile({0, -1}, 0.4), std::invalid_argument);
}

TEST(ForecastSigma, GrowsLinearlyWithLead) {
  SeriesProfile p;
  p.forecast_std = 2.0;
  EXPECT_DOUBLE_EQ(forecast_sigma(p, 0.1, 5), 3.0);
  EXPECT_DOUBLE_EQ(forecast_sigma(p, 0.0, 17), 2.0);
}

ScenarioConfig short_scenario(std::size_t n) {
  ScenarioConfig c;
  c.year_length = n;
  return c;
}

TEST(GenerateTruth, Deterministic) {
  const auto a = generate_truth(short_scenario(500));
  const auto b = generate_truth(short_scenario(500));
  ASSERT_EQ(a.size(), 500u);
  for (std::size_t t = 0; t < a.size(); ++t) EXPECT_EQ(a[t], b[t]);
}

TEST(GenerateTruth, SeedChangesSeries) {
  ScenarioConfig c = short_scenario(50);
  const auto a = generate_truth(c);
  c.seed = 2;
  const auto b = generate_truth(c);
  EXPECT_NE(a[10].e_w, b[10].e_w);
}

TEST(GenerateTruth, DegenerateIsConstant) {
  ScenarioConfig c = short_scenario(300);
  c.make_deterministic();
  for (const auto& e : generate_truth(c)) {
    EXPECT_EQ(e.e_w, c.profile(Series::e_w).base);
    EXPECT_EQ(e.d_hu, c.profile(Series::d_hu).base);
    EXPECT_EQ(e.p_eg, c.profile(Series::p_eg).base);
  }
}

TEST(GenerateTruth, PrefixStable) {
  const auto a = generate_truth(short_scenario(100));
  const auto b = generate_truth(short_scenario(400));
  for (std::size_t t = 0; t < a.size(); ++t) EXPECT_EQ(a[t], b[t]);
}

TEST(GenerateTruth, QuantitiesNonNegative) {
  for (const auto& e : generate_truth(short_scenario(8760))) {
    EXPECT_GE(e.e_w, 0.0);
    EXPECT_GE(e.d_eu, 0.0);
    EXPECT_GE(e.d_hu, 0.0);
    EXPECT_GE(e.d_ef, 0.0);
    EXPECT_GE(e.p_eg, 0.0);
  }
}

TEST(GenerateTruth, WinterHeatExceedsSummer) {
  const auto truth = generate_truth(ScenarioConfig{});
  double winter = 0;
  double summer = 0;
  std::size_t nw = 0;
  std::size_t ns = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const std::size_t week = t / 168;
    if (week < 8 || week >= 48) {
      winter += truth[t].d_hu;
      ++nw;
    } else if (week >= 22 && week < 32) {
      summer += truth[t].d_hu;
      ++ns;
    }
  }
  EXPECT_GT(winter / nw, summer / ns);
}

TEST(ForecastAt, PerfectWhenNoiseless) {
  ScenarioConfig c = short_scenario(200);
  for (auto& p : c.profiles) p.forecast_std = 0;
  c.forecast_growth = 0;
  const auto truth = generate_truth(c);
  const ForecastBundle b = forecast_at(truth, 10, 24, c);
  EXPECT_EQ(b, perfect_forecast(truth, 10, 24));
  for (const Series s : kAllSeries)
    for (std::size_t l = 1; l <= 24; ++l) EXPECT_EQ(b.marginal(s, l).sigma, 0.0);
}

TEST(ForecastAt, DeterministicAndCalibratedSigma) {
  ScenarioConfig c = short_scenario(200);
  const auto truth = generate_truth(c);
  const ForecastBundle a = forecast_at(truth, 5, 24, c);
  const ForecastBundle b = forecast_at(truth, 5, 24, c);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.issued_at, 5u);
  EXPECT_DOUBLE_EQ(a.marginal(Series::e_w, 3).sigma, forecast_sigma(c.profile(Series::e_w), c.forecast_growth, 3));
  EXPECT_NO_THROW(a.validate());
}

TEST(ForecastAt, OutOfRange) {
  const auto truth = generate_truth(short_scenario(30));
  EXPECT_THROW((void)forecast_at(truth, 10, 24, ScenarioConfig{}), std::out_of_range);
  EXPECT_NO_THROW((void)forecast_at(truth, 6, 24, ScenarioConfig{}));
}

TEST(ForecastAt, ErrorsHaveForecastSpread) {
  // Standardized errors over many issue times should be roughly N(0, 1).
  ScenarioConfig c = short_scenario(3000);
  c.profile(Series::d_ef).base = 1e6;  // keep the zero floor out of the way
  const auto truth = generate_truth(c);
  double sum = 0;
  double sq = 0;
  std::size_t n = 0;
  for (std::size_t t = 0; t + 24 <= truth.size(); t += 7) {
    const ForecastBundle b = forecast_at(truth, t, 24, c);
    for (std::size_t l = 1; l <= 24; ++l) {
      const auto& g = b.marginal(Series::d_ef, l);
      const double z = (g.mu - truth[t + l - 1].d_ef) / g.sigma;
      sum += z;
      sq += z * z;
      ++n;
    }
  }
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(sq / n, 1.0, 0.05);
}

TEST(Csv, ThreeRows) {
  std::istringstream in("e_w,d_eu,d_hu,d_ef,p_eg,p_hg\n1,2,3,4,0.1,0.2\n5,6,7,8,0.3,0.4\n9,10,11,12,-0.5,0.6\n");
  const auto t = load_csv(in);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[2].d_ef, 12.0);
  EXPECT_EQ(t[2].p_eg, -0.5);
}

TEST(Csv, NegativeDemandNamesRow) {
  std::istringstream in("e_w,d_eu,d_hu,d_ef,p_eg,p_hg\n1,2,3,4,0.1,0.2\n1,-2,3,4,0.1,0.2\n");
  try {
    (void)load_csv(in);
    FAIL() << "expected CsvError";
  } catch (const CsvError& e) {
    // Line 3 of the file is data row 2.
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("d_eu"), std::string::npos);
  }
}

TEST(Csv, ExtraColumnsIgnored) {
  std::istringstream in("t,note,p_hg,p_eg,d_ef,d_hu,d_eu,e_w,extra\n0,x,0.2,0.1,4,3,2,1,99\n");
  const auto t = load_csv(in);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0], (ExogenousRealization{1, 2, 3, 4, 0.1, 0.2}));
}

TEST(Csv, MissingColumnAndBadNumber) {
  std::istringstream a("e_w,d_eu,d_hu,d_ef,p_eg\n1,2,3,4,5\n");
  EXPECT_THROW((void)load_csv(a), CsvError);
  std::istringstream b("e_w,d_eu,d_hu,d_ef,p_eg,p_hg\n1,2,abc,4,5,6\n");
  EXPECT_THROW((void)load_csv(b), CsvError);
}

TEST(Csv, RoundTrip) {
  const auto truth = generate_truth(short_scenario(100));
  std::stringstream ss;
  write_csv(ss, truth);
  const auto back = load_csv(ss);
  ASSERT_EQ(back.size(), truth.size());
  for (std::size_t t = 0; t < truth.size(); ++t) EXPECT_EQ(back[t], truth[t]);
}

TEST(Csv, CustomSchema) {
  CsvSchema s = default_csv_schema();
  s[index(Series::e_w)] = "wind_kwh";
  std::istringstream in("wind_kwh,d_eu,d_hu,d_ef,p_eg,p_hg\n42,2,3,4,0.1,0.2\n");
  EXPECT_EQ(load_csv(in, s)[0].e_w, 42.0);
}

TEST(Csv, MissingFileIsIoError) { EXPECT_THROW((void)load_csv(std::string("/nonexistent/x.csv")), IoError); }

}  // namespace
}  // namespace ccd
