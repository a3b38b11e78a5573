#pragma once

// Grid search over two policy or storage parameters.
//
// Every cell runs the same replication seeds as the baseline (mean policy on
// the unmodified base config), so cells are paired comparisons. Work is
// spread over (cell, replication) tasks; results land in fixed slots, so the
// output is independent of the worker count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "ccdispatch/error.hpp"
#include "ccdispatch/parallel.hpp"
#include "ccdispatch/policy.hpp"
#include "ccdispatch/sim.hpp"

namespace ccd {

inline constexpr std::array<std::string_view, 6> kAxisNames = {"theta1", "theta2", "alpha1", "alpha2", "sf_e", "sf_h"};

[[nodiscard]] inline bool is_axis_name(std::string_view s) {
  return std::find(kAxisNames.begin(), kAxisNames.end(), s) != kAxisNames.end();
}

struct GridSpec {
  std::string axis1_name;
  std::string axis2_name;
  std::vector<double> axis1_values;
  std::vector<double> axis2_values;
  SimulationConfig base_config;

  /// Throws ConfigError with keys under `grid.`.
  void validate() const {
    const auto axis = [](const std::string& name, const std::vector<double>& values, const char* key) {
      if (!is_axis_name(name)) throw ConfigError(fmt::format("grid.{}_name", key), "unknown axis '" + name + "'");
      if (values.empty()) throw ConfigError(fmt::format("grid.{}_values", key), "must not be empty");
      for (const double v : values) {
        if (!std::isfinite(v)) throw ConfigError(fmt::format("grid.{}_values", key), "values must be finite");
        if (name.starts_with("sf_") && !(v > 0.0))
          throw ConfigError(fmt::format("grid.{}_values", key), "storage factors must be > 0");
      }
    };
    axis(axis1_name, axis1_values, "axis1");
    axis(axis2_name, axis2_values, "axis2");
    if (axis1_name == axis2_name) throw ConfigError("grid.axis2_name", "must differ from axis1_name");
  }
};

enum class GridKind { kTheta, kAlpha, kStorage };

[[nodiscard]] constexpr std::string_view to_string(GridKind k) {
  switch (k) {
    case GridKind::kTheta: return "theta";
    case GridKind::kAlpha: return "alpha";
    case GridKind::kStorage: return "storage";
  }
  return "?";
}

/// Default axes for each kind of search.
[[nodiscard]] inline GridSpec default_grid(GridKind kind, SimulationConfig base) {
  GridSpec g;
  g.base_config = std::move(base);
  const std::vector<double> sf = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  switch (kind) {
    case GridKind::kTheta:
      g.axis1_name = "theta1";
      g.axis2_name = "theta2";
      g.axis1_values = {0.6, 0.7, 0.8, 0.9, 1.0, 1.1};
      g.axis2_values = {0.0, 0.05, 0.1, 0.2};
      break;
    case GridKind::kAlpha:
      g.axis1_name = "alpha1";
      g.axis2_name = "alpha2";
      g.axis1_values = {0.5, 0.7, 0.9, 0.95, 0.99};
      g.axis2_values = {0.0, 0.05, 0.1, 0.2};
      break;
    case GridKind::kStorage:
      g.axis1_name = "sf_e";
      g.axis2_name = "sf_h";
      g.axis1_values = sf;
      g.axis2_values = sf;
      break;
  }
  return g;
}

/// `base` with one axis set to `value`. Theta axes switch the policy to
/// theta_exp, alpha axes to cc_alpha_exp; storage factors scale the
/// capacity and set both rate limits to a tenth of it.
[[nodiscard]] inline SimulationConfig apply_axis(SimulationConfig cfg, std::string_view axis, double value,
                                                 const SimulationConfig& base) {
  const auto to_kind = [&](PolicyKind k) {
    if (cfg.policy.kind != k) {
      const PolicyParams old = cfg.policy;
      cfg.policy = PolicyParams{};
      cfg.policy.kind = k;
      if (k == PolicyKind::kThetaExp && is_theta(old.kind)) {
        cfg.policy.theta1 = old.theta1;
        cfg.policy.theta2 = old.kind == PolicyKind::kThetaExp ? old.theta2 : 0.0;
      }
      if (k == PolicyKind::kCcAlphaExp && old.kind == PolicyKind::kCcAlphaExp) {
        cfg.policy.alpha1 = old.alpha1;
        cfg.policy.alpha2 = old.alpha2;
      }
    }
  };
  if (axis == "theta1" || axis == "theta2") {
    to_kind(PolicyKind::kThetaExp);
    (axis == "theta1" ? cfg.policy.theta1 : cfg.policy.theta2) = value;
  } else if (axis == "alpha1" || axis == "alpha2") {
    to_kind(PolicyKind::kCcAlphaExp);
    (axis == "alpha1" ? cfg.policy.alpha1 : cfg.policy.alpha2) = value;
  } else if (axis == "sf_e") {
    cfg.params.r_e_max = value * base.params.r_e_max;
    cfg.params.gamma_e_c = cfg.params.gamma_e_d = cfg.params.r_e_max / 10.0;
    cfg.params.r_e_min = std::min(cfg.params.r_e_min, cfg.params.r_e_max);
    cfg.params.r_e_0 = std::clamp(cfg.params.r_e_0, cfg.params.r_e_min, cfg.params.r_e_max);
  } else if (axis == "sf_h") {
    cfg.params.r_h_max = value * base.params.r_h_max;
    cfg.params.gamma_h_c = cfg.params.gamma_h_d = cfg.params.r_h_max / 10.0;
    cfg.params.r_h_min = std::min(cfg.params.r_h_min, cfg.params.r_h_max);
    cfg.params.r_h_0 = std::clamp(cfg.params.r_h_0, cfg.params.r_h_min, cfg.params.r_h_max);
  } else {
    throw ConfigError("grid.axis_name", "unknown axis '" + std::string(axis) + "'");
  }
  return cfg;
}

/// Config of cell (i, j).
[[nodiscard]] inline SimulationConfig cell_config(const GridSpec& spec, std::size_t i, std::size_t j) {
  SimulationConfig cfg = apply_axis(spec.base_config, spec.axis1_name, spec.axis1_values.at(i), spec.base_config);
  return apply_axis(std::move(cfg), spec.axis2_name, spec.axis2_values.at(j), spec.base_config);
}

/// Baseline config: the base config with the mean policy.
[[nodiscard]] inline SimulationConfig baseline_config(const GridSpec& spec) {
  SimulationConfig cfg = spec.base_config;
  cfg.policy = PolicyParams{};
  return cfg;
}

struct GridCell {
  double mean_cost = 0.0;
  double std_cost = 0.0;
  std::size_t replications = 0;
  /// Per-replication totals in seed order.
  std::vector<double> totals;
};

struct BestCell {
  std::size_t i = 0;
  std::size_t j = 0;
  double axis1 = 0.0;
  double axis2 = 0.0;

  friend bool operator==(const BestCell&, const BestCell&) = default;
};

struct GridResult {
  std::string axis1_name;
  std::string axis2_name;
  std::vector<double> axis1_values;
  std::vector<double> axis2_values;
  /// cells[i][j] belongs to (axis1_values[i], axis2_values[j]).
  std::vector<std::vector<GridCell>> cells;
  std::vector<std::vector<double>> normalized;
  BestCell best_cell;
  double baseline_cost = 0.0;
  std::vector<double> baseline_totals;
};

/// Minimum of `normalized`; ties go to the lexicographically smallest (i, j).
[[nodiscard]] inline BestCell find_best(const std::vector<std::vector<double>>& normalized,
                                        const std::vector<double>& axis1, const std::vector<double>& axis2) {
  BestCell best;
  double v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    for (std::size_t j = 0; j < normalized[i].size(); ++j) {
      if (normalized[i][j] < v) {
        v = normalized[i][j];
        best = {i, j, axis1.at(i), axis2.at(j)};
      }
    }
  }
  return best;
}

/// Fills `normalized` and `best_cell` from the cell means and the baseline.
inline void normalize(GridResult& r) {
  r.normalized.assign(r.cells.size(), {});
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    r.normalized[i].reserve(r.cells[i].size());
    for (const auto& c : r.cells[i]) r.normalized[i].push_back(c.mean_cost / r.baseline_cost);
  }
  r.best_cell = find_best(r.normalized, r.axis1_values, r.axis2_values);
}

/// Runs every cell and the baseline with `base_config.replications` paired
/// seeds on up to `jobs` threads.
[[nodiscard]] inline GridResult run_grid(const GridSpec& spec, std::size_t jobs = 1) {
  spec.validate();
  const std::size_t n1 = spec.axis1_values.size();
  const std::size_t n2 = spec.axis2_values.size();
  const std::size_t reps = spec.base_config.replications;

  std::vector<SimulationConfig> configs;
  configs.reserve(n1 * n2 + 1);
  configs.push_back(baseline_config(spec));
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) configs.push_back(cell_config(spec, i, j));
  for (std::size_t c = 0; c < configs.size(); ++c) {
    try {
      configs[c].validate();
    } catch (const ConfigError& e) {
      if (c == 0) throw;
      throw ConfigError(e.key(), fmt::format("cell ({}, {}): {}", (c - 1) / n2, (c - 1) % n2, e.reason()));
    }
  }

  std::vector<double> totals(configs.size() * reps, 0.0);
  parallel_for(totals.size(), jobs, [&](std::size_t task) {
    const std::size_t c = task / reps;
    const std::size_t r = task % reps;
    try {
      totals[task] = run(configs[c], replication_seed(spec.base_config.scenario.seed, r)).total_cost;
    } catch (const Error& e) {
      if (c == 0) throw Error(fmt::format("baseline, replication {}: {}", r, e.what()));
      throw Error(fmt::format("cell ({}, {}), replication {}: {}", (c - 1) / n2, (c - 1) % n2, r, e.what()));
    }
  });

  const auto slice = [&](std::size_t c) {
    return std::vector<double>(totals.begin() + static_cast<std::ptrdiff_t>(c * reps),
                               totals.begin() + static_cast<std::ptrdiff_t>((c + 1) * reps));
  };

  GridResult res;
  res.axis1_name = spec.axis1_name;
  res.axis2_name = spec.axis2_name;
  res.axis1_values = spec.axis1_values;
  res.axis2_values = spec.axis2_values;
  res.baseline_totals = slice(0);
  res.baseline_cost = summarize(res.baseline_totals).mean_cost;
  res.cells.assign(n1, std::vector<GridCell>(n2));
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const ReplicationSummary s = summarize(slice(1 + i * n2 + j));
      res.cells[i][j] = {s.mean_cost, s.std_cost, reps, s.totals};
    }
  }
  normalize(res);
  return res;
}

/// Per-lead schedule of the winning cell. `kind` must match the axes.
[[nodiscard]] inline LeadSchedule best_schedule(const GridResult& r, GridKind kind, std::size_t horizon) {
  PolicyParams p;
  if (kind == GridKind::kTheta && r.axis1_name == "theta1" && r.axis2_name == "theta2") {
    p.kind = PolicyKind::kThetaExp;
    p.theta1 = r.best_cell.axis1;
    p.theta2 = r.best_cell.axis2;
    return theta_schedule(p, horizon);
  }
  if (kind == GridKind::kAlpha && r.axis1_name == "alpha1" && r.axis2_name == "alpha2") {
    p.kind = PolicyKind::kCcAlphaExp;
    p.alpha1 = r.best_cell.axis1;
    p.alpha2 = r.best_cell.axis2;
    return alpha_schedule(p, horizon);
  }
  throw std::invalid_argument(
      fmt::format("best_schedule: {} schedule needs its own axes, grid has ({}, {})", to_string(kind), r.axis1_name,
                  r.axis2_name));
}

// ---------------------------------------------------------------------------
// CSV output

inline void emit_heatmap(const GridResult& r, std::ostream& out) {
  out << "axis1,axis2,mean_cost,std_cost,normalized\n";
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    for (std::size_t j = 0; j < r.cells[i].size(); ++j) {
      const GridCell& c = r.cells[i][j];
      out << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", r.axis1_values[i], r.axis2_values[j], c.mean_cost,
                         c.std_cost, r.normalized[i][j]);
    }
  }
}

inline void emit_heatmap(const GridResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  emit_heatmap(r, out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

struct HeatmapRow {
  double axis1 = 0.0;
  double axis2 = 0.0;
  double mean_cost = 0.0;
  double std_cost = 0.0;
  double normalized = 0.0;
};

/// Reads back a file written by emit_heatmap.
[[nodiscard]] inline std::vector<HeatmapRow> parse_heatmap(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "axis1,axis2,mean_cost,std_cost,normalized")
    throw CsvError(1, "unexpected heatmap header");
  std::vector<HeatmapRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 5) throw CsvError(line_no, "expected 5 columns");
    std::array<double, 5> v{};
    for (std::size_t k = 0; k < 5; ++k) {
      const auto d = detail::parse_double(cells[k]);
      if (!d) throw CsvError(line_no, "non-numeric value '" + std::string(cells[k]) + "'");
      v[k] = *d;
    }
    rows.push_back({v[0], v[1], v[2], v[3], v[4]});
  }
  return rows;
}

inline void write_schedule(const LeadSchedule& s, std::ostream& out) {
  out << "lead,value\n";
  for (std::size_t l = 1; l <= s.size(); ++l) out << fmt::format("{},{:.9g}\n", l, s.at_lead(l));
}

inline void write_schedule(const LeadSchedule& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_schedule(s, out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Analysis helpers

/// Two-sided exact sign test p-value for paired samples, ties dropped.
[[nodiscard]] inline double sign_test_p(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sign_test_p: sample sizes differ");
  std::size_t plus = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == b[k]) continue;
    ++n;
    if (a[k] > b[k]) ++plus;
  }
  if (n == 0) return 1.0;
  const std::size_t m = std::min(plus, n - plus);
  // P(X <= m) for X ~ Bin(n, 1/2), doubled.
  double tail = 0.0;
  double c = 1.0;  // C(n, k)
  for (std::size_t k = 0; k <= m; ++k) {
    tail += c;
    c = c * static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  return std::min(1.0, 2.0 * tail * std::pow(0.5, static_cast<double>(n)));
}

/// Range of the row means (axis 1 effect) and of the column means (axis 2
/// effect) of `normalized`.
struct AxisRanges {
  double axis1 = 0.0;
  double axis2 = 0.0;
};

[[nodiscard]] inline AxisRanges axis_ranges(const std::vector<std::vector<double>>& normalized) {
  AxisRanges r;
  if (normalized.empty() || normalized.front().empty()) return r;
  const std::size_t n1 = normalized.size();
  const std::size_t n2 = normalized.front().size();
  std::vector<double> rows(n1, 0.0);
  std::vector<double> cols(n2, 0.0);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      rows[i] += normalized[i][j] / static_cast<double>(n2);
      cols[j] += normalized[i][j] / static_cast<double>(n1);
    }
  }
  const auto range = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  r.axis1 = range(rows);
  r.axis2 = range(cols);
  return r;
}

}  // namespace ccd
