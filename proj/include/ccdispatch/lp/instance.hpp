#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ccdispatch/model.hpp"

namespace ccd::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

[[nodiscard]] constexpr std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::kLessEqual: return "<=";
    case Relation::kEqual: return "=";
    case Relation::kGreaterEqual: return ">=";
  }
  return "?";
}

/// Sparse row `sum value[k] * x[index[k]]  (relation)  rhs`.
struct Row {
  std::vector<int> index;
  std::vector<double> value;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  std::string label;

  [[nodiscard]] double coefficient(int var) const {
    double c = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k)
      if (index[k] == var) c += value[k];
    return c;
  }

  [[nodiscard]] double activity(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * x[static_cast<std::size_t>(index[k])];
    return s;
  }

  friend bool operator==(const Row&, const Row&) = default;
};

/// minimize objective'x + objective_offset subject to rows and
/// lower <= x <= upper. Lower bounds must be finite.
struct Instance {
  std::vector<std::string> var_names;
  std::vector<double> objective;
  double objective_offset = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;
  /// Lead count for dispatch instances built by `build`; 0 otherwise.
  std::size_t horizon = 0;

  [[nodiscard]] int num_vars() const { return static_cast<int>(objective.size()); }
  [[nodiscard]] int num_rows() const { return static_cast<int>(rows.size()); }

  int add_var(std::string name, double cost, double lo = 0.0, double up = kInfinity) {
    var_names.push_back(std::move(name));
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(up);
    return num_vars() - 1;
  }

  Row& add_row(std::string label, Relation rel, double rhs) {
    Row r;
    r.label = std::move(label);
    r.relation = rel;
    r.rhs = rhs;
    rows.push_back(std::move(r));
    return rows.back();
  }

  /// Throws std::invalid_argument on inconsistent sizes, out-of-range
  /// indices, non-finite coefficients or infinite lower bounds.
  void validate() const {
    const auto n = objective.size();
    if (n == 0) throw std::invalid_argument("lp instance has no variables");
    if (var_names.size() != n || lower.size() != n || upper.size() != n)
      throw std::invalid_argument("lp instance: per-variable vectors differ in length");
    if (!std::isfinite(objective_offset)) throw std::invalid_argument("lp instance: non-finite objective offset");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(objective[j])) throw std::invalid_argument("lp instance: non-finite cost for " + var_names[j]);
      if (!std::isfinite(lower[j])) throw std::invalid_argument("lp instance: infinite lower bound for " + var_names[j]);
      if (std::isnan(upper[j]) || upper[j] < lower[j])
        throw std::invalid_argument("lp instance: invalid bounds for " + var_names[j]);
    }
    for (const auto& r : rows) {
      if (r.index.size() != r.value.size()) throw std::invalid_argument("lp row " + r.label + ": size mismatch");
      if (!std::isfinite(r.rhs)) throw std::invalid_argument("lp row " + r.label + ": non-finite rhs");
      for (std::size_t k = 0; k < r.index.size(); ++k) {
        if (r.index[k] < 0 || static_cast<std::size_t>(r.index[k]) >= n)
          throw std::invalid_argument("lp row " + r.label + ": variable index out of range");
        if (!std::isfinite(r.value[k])) throw std::invalid_argument("lp row " + r.label + ": non-finite coefficient");
      }
    }
  }

  [[nodiscard]] double objective_at(const std::vector<double>& x) const {
    double v = objective_offset;
    for (std::size_t j = 0; j < objective.size(); ++j) v += objective[j] * x[j];
    return v;
  }

  /// Largest violation of any row or bound at `x` (0 when feasible).
  [[nodiscard]] double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (const auto& r : rows) {
      const double a = r.activity(x);
      double v = 0.0;
      switch (r.relation) {
        case Relation::kLessEqual: v = a - r.rhs; break;
        case Relation::kGreaterEqual: v = r.rhs - a; break;
        case Relation::kEqual: v = std::abs(a - r.rhs); break;
      }
      worst = std::max(worst, v);
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
      worst = std::max(worst, lower[j] - x[j]);
      worst = std::max(worst, x[j] - upper[j]);
    }
    return worst;
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

[[nodiscard]] constexpr std::string_view to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration_limit";
  }
  return "?";
}

struct Solution {
  Status status = Status::kInfeasible;
  double objective_value = 0.0;
  std::vector<double> primal;
  /// One multiplier per instance row, sign convention of a minimization
  /// (<= rows have duals <= 0, >= rows >= 0).
  std::vector<double> duals;
  /// Objective of the dual solution recovered from the final basis.
  double dual_objective = 0.0;
  std::size_t iterations = 0;
  /// Infeasible: label of the row whose artificial stayed positive.
  /// Unbounded: name of the entering variable along the unbounded ray.
  std::string hint;
  /// Lead-1 flows for dispatch instances.
  FlowDecision first_step;
};

}  // namespace ccd::lp
