#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "ccdispatch/error.hpp"
#include "ccdispatch/model.hpp"
#include "ccdispatch/normal.hpp"
#include "ccdispatch/rng.hpp"

namespace ccd {

/// The six uncertain series, in CSV column order.
enum class Series : std::size_t { e_w, d_eu, d_hu, d_ef, p_eg, p_hg };

inline constexpr std::size_t kSeriesCount = 6;
inline constexpr std::array<Series, kSeriesCount> kAllSeries = {
    Series::e_w, Series::d_eu, Series::d_hu, Series::d_ef, Series::p_eg, Series::p_hg};
inline constexpr std::array<std::string_view, kSeriesCount> kSeriesNames = {
    "e_w", "d_eu", "d_hu", "d_ef", "p_eg", "p_hg"};

[[nodiscard]] constexpr std::size_t index(Series s) { return static_cast<std::size_t>(s); }

/// Wind and demands are physical quantities and never negative.
[[nodiscard]] constexpr bool is_quantity(Series s) { return s != Series::p_eg && s != Series::p_hg; }

[[nodiscard]] inline double& value_of(ExogenousRealization& e, Series s) {
  switch (s) {
    case Series::e_w: return e.e_w;
    case Series::d_eu: return e.d_eu;
    case Series::d_hu: return e.d_hu;
    case Series::d_ef: return e.d_ef;
    case Series::p_eg: return e.p_eg;
    case Series::p_hg: return e.p_hg;
  }
  return e.e_w;
}
[[nodiscard]] inline double value_of(const ExogenousRealization& e, Series s) {
  return value_of(const_cast<ExogenousRealization&>(e), s);
}

using Trajectory = std::vector<ExogenousRealization>;

// ---------------------------------------------------------------------------
// Gaussian marginals

struct GaussianMarginal {
  double mu = 0.0;
  double sigma = 0.0;

  friend bool operator==(const GaussianMarginal&, const GaussianMarginal&) = default;
};

/// mu + sigma * Phi^-1(p). Exactly mu at p = 0.5 or sigma = 0.
[[nodiscard]] inline double quantile(const GaussianMarginal& g, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in (0, 1)");
  if (g.sigma < 0.0 || !std::isfinite(g.sigma) || !std::isfinite(g.mu)) {
    throw std::invalid_argument("quantile: marginal must be finite with sigma >= 0");
  }
  if (g.sigma == 0.0) return g.mu;
  return g.mu + g.sigma * normal_quantile(p);
}

/// Per-lead marginals for each series, issued at step `issued_at`. Lead l
/// (1-based) describes step issued_at + l - 1.
struct ForecastBundle {
  std::size_t issued_at = 0;
  std::size_t horizon = 0;
  std::array<std::vector<GaussianMarginal>, kSeriesCount> series;

  [[nodiscard]] std::vector<GaussianMarginal>& at(Series s) { return series[index(s)]; }
  [[nodiscard]] const std::vector<GaussianMarginal>& at(Series s) const { return series[index(s)]; }

  /// Marginal of series `s` at lead `lead` (1-based).
  [[nodiscard]] const GaussianMarginal& marginal(Series s, std::size_t lead) const {
    return series[index(s)].at(lead - 1);
  }

  /// Throws std::invalid_argument if any vector length differs from the
  /// horizon, a marginal is non-finite, sigma < 0 or a quantity mean < 0.
  void validate() const {
    for (const Series s : kAllSeries) {
      const auto& v = at(s);
      if (v.size() != horizon) throw std::invalid_argument("forecast bundle: series length != horizon");
      for (const auto& g : v) {
        if (!std::isfinite(g.mu) || !std::isfinite(g.sigma) || g.sigma < 0.0)
          throw std::invalid_argument("forecast bundle: invalid marginal");
        if (is_quantity(s) && g.mu < 0.0)
          throw std::invalid_argument("forecast bundle: negative mean for a quantity series");
      }
    }
  }

  friend bool operator==(const ForecastBundle&, const ForecastBundle&) = default;
};

/// Bundle with zero spread built directly from a trajectory window.
[[nodiscard]] inline ForecastBundle perfect_forecast(const Trajectory& truth, std::size_t t,
                                                     std::size_t horizon) {
  if (horizon == 0 || t + horizon > truth.size()) throw std::out_of_range("perfect_forecast: window out of range");
  ForecastBundle b;
  b.issued_at = t;
  b.horizon = horizon;
  for (const Series s : kAllSeries) {
    auto& v = b.at(s);
    v.reserve(horizon);
    for (std::size_t l = 0; l < horizon; ++l) v.push_back({value_of(truth[t + l], s), 0.0});
  }
  return b;
}

// ---------------------------------------------------------------------------
// Synthetic scenarios

/// Shape of one synthetic series, all in series units:
///   base + seasonal * cos(2pi (day - peak_day) / 365)
///        + diurnal  * cos(2pi (hour - peak_hour) / 24) + AR(1) noise
/// The noise is stationary with standard deviation `noise_std`.
/// `forecast_std` is the forecast spread at lead 0 before growth.
struct SeriesProfile {
  double base = 0.0;
  double diurnal_amplitude = 0.0;
  double seasonal_amplitude = 0.0;
  double noise_std = 0.0;
  double forecast_std = 0.0;

  friend bool operator==(const SeriesProfile&, const SeriesProfile&) = default;
};

/// Peak hour of day and peak day of year per series. Seasonal peaks sit in
/// mid January for every series; urban electricity peaks in the evening,
/// heat in the morning, the foundry around midday.
inline constexpr std::array<double, kSeriesCount> kPeakHour = {14.0, 19.0, 7.0, 11.0, 18.0, 18.0};
inline constexpr std::array<double, kSeriesCount> kPeakDay = {15.0, 15.0, 15.0, 15.0, 15.0, 15.0};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::size_t year_length = 8760;
  std::array<SeriesProfile, kSeriesCount> profiles = default_profiles();
  /// sigma at lead l is forecast_std * (1 + forecast_growth * l).
  double forecast_growth = 0.1;
  double ar1_rho = 0.9;
  bool allow_negative_prices = false;

  [[nodiscard]] SeriesProfile& profile(Series s) { return profiles[index(s)]; }
  [[nodiscard]] const SeriesProfile& profile(Series s) const { return profiles[index(s)]; }

  /// Default synthetic system around 10000 households and one foundry.
  [[nodiscard]] static constexpr std::array<SeriesProfile, kSeriesCount> default_profiles() {
    return {{
        // base, diurnal, seasonal, noise, forecast
        {12000.0, 1000.0, 4000.0, 6000.0, 1500.0},  // e_w
        {4500.0, 1500.0, 800.0, 300.0, 150.0},      // d_eu
        {9000.0, 1500.0, 7000.0, 800.0, 400.0},     // d_hu
        {15000.0, 3000.0, 0.0, 1500.0, 800.0},      // d_ef
        {0.11, 0.03, 0.01, 0.02, 0.01},             // p_eg
        {0.09, 0.0, 0.0, 0.0, 0.0},                 // p_hg
    }};
  }

  /// Every profile set to a constant base level with no noise.
  void make_deterministic() {
    for (auto& p : profiles) {
      p.diurnal_amplitude = p.seasonal_amplitude = p.noise_std = p.forecast_std = 0.0;
    }
    forecast_growth = 0.0;
  }

  /// Throws ConfigError naming the offending field (without section prefix).
  void validate() const {
    if (year_length < 1) throw ConfigError("year_length", "must be >= 1");
    if (!(ar1_rho >= 0.0 && ar1_rho < 1.0)) throw ConfigError("ar1_rho", "must lie in [0, 1)");
    if (!std::isfinite(forecast_growth)) throw ConfigError("forecast_growth", "must be finite");
    for (const Series s : kAllSeries) {
      const auto& p = profile(s);
      const std::string prefix = "series." + std::string(kSeriesNames[index(s)]) + ".";
      if (!std::isfinite(p.base)) throw ConfigError(prefix + "base", "must be finite");
      const auto nonneg = [&](double v, const char* field) {
        if (!std::isfinite(v) || v < 0.0) throw ConfigError(prefix + field, "must be finite and >= 0");
      };
      nonneg(p.diurnal_amplitude, "diurnal_amplitude");
      nonneg(p.seasonal_amplitude, "seasonal_amplitude");
      nonneg(p.noise_std, "noise_std");
      nonneg(p.forecast_std, "forecast_std");
    }
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Synthetic realized trajectory of `cfg.year_length` hourly steps. Pure
/// function of the config.
[[nodiscard]] inline Trajectory generate_truth(const ScenarioConfig& cfg) {
  cfg.validate();
  Trajectory out(cfg.year_length);
  const double innovation = std::sqrt(1.0 - cfg.ar1_rho * cfg.ar1_rho);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  for (const Series s : kAllSeries) {
    const auto& prof = cfg.profile(s);
    const std::size_t k = index(s);
    double noise = 0.0;
    for (std::size_t t = 0; t < cfg.year_length; ++t) {
      const double z = prof.noise_std > 0.0 ? rng::normal(cfg.seed, rng::Stream::kTruthNoise, k, t) : 0.0;
      noise = (t == 0) ? prof.noise_std * z : cfg.ar1_rho * noise + innovation * prof.noise_std * z;

      const double hour = static_cast<double>(t % 24);
      const double day = static_cast<double>(t) / 24.0;
      double v = prof.base;
      if (prof.seasonal_amplitude != 0.0) v += prof.seasonal_amplitude * std::cos(two_pi * (day - kPeakDay[k]) / 365.0);
      if (prof.diurnal_amplitude != 0.0) v += prof.diurnal_amplitude * std::cos(two_pi * (hour - kPeakHour[k]) / 24.0);
      v += noise;
      if ((is_quantity(s) || !cfg.allow_negative_prices) && v < 0.0) v = 0.0;
      value_of(out[t], s) = v;
    }
  }
  return out;
}

/// Forecast spread at lead `lead`.
[[nodiscard]] inline double forecast_sigma(const SeriesProfile& p, double growth, std::size_t lead) {
  return p.forecast_std * (1.0 + growth * static_cast<double>(lead));
}

/// Probabilistic forecast issued at step `t` for steps t .. t+H-1. The mean
/// is the realized value plus a seeded draw with the forecast's own spread,
/// so the marginals are calibrated; draws are independent across leads.
[[nodiscard]] inline ForecastBundle forecast_at(const Trajectory& truth, std::size_t t, std::size_t horizon,
                                                const ScenarioConfig& cfg) {
  if (horizon == 0) throw std::invalid_argument("forecast_at: horizon must be >= 1");
  if (t + horizon > truth.size()) {
    throw std::out_of_range(fmt::format("forecast_at: t={} with horizon {} exceeds trajectory length {}", t,
                                        horizon, truth.size()));
  }
  ForecastBundle b;
  b.issued_at = t;
  b.horizon = horizon;
  for (const Series s : kAllSeries) {
    const auto& prof = cfg.profile(s);
    auto& v = b.at(s);
    v.reserve(horizon);
    for (std::size_t lead = 1; lead <= horizon; ++lead) {
      const double sigma = forecast_sigma(prof, cfg.forecast_growth, lead);
      double mu = value_of(truth[t + lead - 1], s);
      if (sigma > 0.0) {
        mu += sigma * rng::normal(cfg.seed, rng::Stream::kForecastNoise, t, index(s) * 65536 + lead);
      }
      if ((is_quantity(s) || !cfg.allow_negative_prices) && mu < 0.0) mu = 0.0;
      v.push_back({mu, sigma});
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// CSV ingestion

/// Column name for each series.
using CsvSchema = std::array<std::string, kSeriesCount>;

[[nodiscard]] inline CsvSchema default_csv_schema() {
  CsvSchema s;
  for (std::size_t i = 0; i < kSeriesCount; ++i) s[i] = std::string(kSeriesNames[i]);
  return s;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      cells.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return cells;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses a realization table. The header must name every schema column;
/// other columns (including `t`) are ignored. Rows are in step order.
[[nodiscard]] inline Trajectory load_csv(std::istream& in, const CsvSchema& schema = default_csv_schema()) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw CsvError(1, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = detail::split_csv(line);
  std::array<std::size_t, kSeriesCount> column{};
  for (std::size_t k = 0; k < kSeriesCount; ++k) {
    bool found = false;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == schema[k]) {
        column[k] = c;
        found = true;
        break;
      }
    }
    if (!found) throw CsvError(1, "missing column '" + schema[k] + "'");
  }

  Trajectory out;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    ExogenousRealization row;
    for (std::size_t k = 0; k < kSeriesCount; ++k) {
      if (column[k] >= cells.size()) throw CsvError(line_no, "missing value for '" + schema[k] + "'");
      const auto v = detail::parse_double(cells[column[k]]);
      if (!v || !std::isfinite(*v)) {
        throw CsvError(line_no, "non-numeric value '" + std::string(cells[column[k]]) + "' in column '" +
                                    schema[k] + "'");
      }
      if (is_quantity(kAllSeries[k]) && *v < 0.0) {
        throw CsvError(line_no, "negative value in column '" + schema[k] + "'");
      }
      value_of(row, kAllSeries[k]) = *v;
    }
    out.push_back(row);
  }
  return out;
}

[[nodiscard]] inline Trajectory load_csv(const std::string& path, const CsvSchema& schema = default_csv_schema()) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_csv(in, schema);
}

/// Writes `t,e_w,d_eu,d_hu,d_ef,p_eg,p_hg` with shortest round-trip digits.
inline void write_csv(std::ostream& out, const Trajectory& truth) {
  out << "t,e_w,d_eu,d_hu,d_ef,p_eg,p_hg\n";
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const auto& e = truth[t];
    out << fmt::format("{},{},{},{},{},{},{}\n", t, e.e_w, e.d_eu, e.d_hu, e.d_ef, e.p_eg, e.p_hg);
  }
}

inline void write_csv(const std::string& path, const Trajectory& truth) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_csv(out, truth);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace ccd
