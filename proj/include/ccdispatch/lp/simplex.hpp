#pragma once

// Dense revised simplex.
//
// The instance is brought to standard form (x >= 0, A x = b, b >= 0) by
// shifting lower bounds, turning finite upper bounds into rows, adding
// slack/surplus columns and flipping rows with negative right-hand side.
// Rows without a +1 slack get an artificial column. Phase 1 minimizes the
// sum of artificials, phase 2 the original costs.
//
// The basis inverse is kept explicitly and updated by elementary row
// operations. Pricing is Dantzig (most negative reduced cost); after
// `degenerate_switch` consecutive degenerate pivots the solver uses Bland's
// rule (lowest index entering, lowest basic index among ratio ties) until
// the objective moves again, which rules out cycling. Every choice is a
// deterministic function of the instance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ccdispatch/lp/instance.hpp"

namespace ccd::lp {

struct SolverOptions {
  double pivot_tolerance = 1e-9;
  /// Relative to max(1, |b|_inf) for the phase-1 infeasibility test.
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-9;
  std::size_t degenerate_switch = 50;
  /// Basic values and duals are recomputed from the inverse this often.
  std::size_t refresh_interval = 128;
  /// 0 selects 50 * (rows + columns) + 1000.
  std::size_t max_iterations = 0;
};

namespace detail {

class RevisedSimplex {
public:
  RevisedSimplex(const Instance& inst, const SolverOptions& opt) : inst_(inst), opt_(opt) { standardize(); }

  Solution run() {
    Solution sol;
    const std::size_t limit =
        opt_.max_iterations ? opt_.max_iterations : 50 * static_cast<std::size_t>(m_ + n_) + 1000;

    if (num_artificial_ > 0 && !crash()) {
      std::vector<double> phase1(static_cast<std::size_t>(n_), 0.0);
      for (int j = 0; j < n_; ++j)
        if (kind_[j] == Kind::kArtificial) phase1[j] = 1.0;
      const auto res = iterate(phase1, limit);
      if (res == Outcome::kLimit) return finish_limit(sol);

      double infeasibility = 0.0;
      int worst = -1;
      for (int i = 0; i < m_; ++i) {
        if (kind_[basis_[i]] == Kind::kArtificial && xb_[i] > infeasibility) {
          infeasibility = xb_[i];
          worst = i;
        }
      }
      double bmax = 1.0;
      for (const double v : b_) bmax = std::max(bmax, v);
      if (infeasibility > opt_.feasibility_tolerance * bmax) {
        sol.status = Status::kInfeasible;
        sol.iterations = iterations_;
        const int orig = orig_row_[worst];
        sol.hint = orig >= 0 ? inst_.rows[orig].label : "bound:" + inst_.var_names[bound_var_[worst]];
        return sol;
      }
      drive_out_artificials();
    }

    const auto res = iterate(cost_, limit);
    if (res == Outcome::kLimit) return finish_limit(sol);
    if (res == Outcome::kUnbounded) {
      sol.status = Status::kUnbounded;
      sol.iterations = iterations_;
      int var = struct_of_col_[unbounded_col_];
      if (var < 0) {
        // A slack opened the ray; name the structural growing fastest along it.
        double steepest = 0.0;
        for (int i = 0; i < m_; ++i) {
          const int s = struct_of_col_[basis_[i]];
          if (s >= 0 && -alpha_[i] > steepest) {
            steepest = -alpha_[i];
            var = s;
          }
        }
      }
      sol.hint = var >= 0 ? inst_.var_names[var] : "slack";
      return sol;
    }
    return extract(sol);
  }

private:
  enum class Kind : std::uint8_t { kStructural, kSlack, kArtificial };
  enum class Outcome { kOptimal, kUnbounded, kLimit };

  const Instance& inst_;
  SolverOptions opt_;

  int m_ = 0;
  int n_ = 0;
  int num_artificial_ = 0;
  std::vector<int> col_start_;
  std::vector<int> row_ind_;
  std::vector<double> col_val_;
  std::vector<Kind> kind_;
  std::vector<int> struct_of_col_;
  std::vector<double> cost_;
  std::vector<double> b_;
  std::vector<int> b_nonzero_;
  std::vector<double> row_sign_;
  std::vector<int> orig_row_;
  std::vector<int> bound_var_;

  std::vector<int> basis_;
  std::vector<int> pos_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  std::vector<double> y_;
  std::vector<double> alpha_;
  std::vector<int> pivot_nz_;
  std::size_t iterations_ = 0;
  int unbounded_col_ = -1;

  // -------------------------------------------------------------------------

  void standardize() {
    const int nv = inst_.num_vars();
    std::vector<std::vector<std::pair<int, double>>> cols;
    std::vector<int> col_of_var(static_cast<std::size_t>(nv), -1);
    for (int j = 0; j < nv; ++j) {
      if (inst_.upper[j] == inst_.lower[j]) continue;  // fixed: folded into the rhs
      col_of_var[j] = static_cast<int>(cols.size());
      cols.emplace_back();
      kind_.push_back(Kind::kStructural);
      struct_of_col_.push_back(j);
      cost_.push_back(inst_.objective[j]);
    }

    struct StdRow {
      Relation rel;
      double rhs;
      int orig;
      int bound_var;
    };
    std::vector<StdRow> rows;
    for (int i = 0; i < inst_.num_rows(); ++i) {
      const Row& r = inst_.rows[i];
      double rhs = r.rhs;
      for (std::size_t k = 0; k < r.index.size(); ++k) {
        const int j = r.index[k];
        rhs -= r.value[k] * inst_.lower[j];
        if (col_of_var[j] >= 0 && r.value[k] != 0.0)
          cols[col_of_var[j]].emplace_back(static_cast<int>(rows.size()), r.value[k]);
      }
      rows.push_back({r.relation, rhs, i, -1});
    }
    for (int j = 0; j < nv; ++j) {
      if (col_of_var[j] < 0 || !std::isfinite(inst_.upper[j])) continue;
      cols[col_of_var[j]].emplace_back(static_cast<int>(rows.size()), 1.0);
      rows.push_back({Relation::kLessEqual, inst_.upper[j] - inst_.lower[j], -1, j});
    }

    m_ = static_cast<int>(rows.size());
    b_.resize(m_);
    row_sign_.resize(m_);
    orig_row_.resize(m_);
    bound_var_.resize(m_);
    basis_.assign(m_, -1);

    std::vector<double> slack_coef(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const double sign = rows[i].rhs < 0.0 ? -1.0 : 1.0;
      row_sign_[i] = sign;
      b_[i] = sign * rows[i].rhs;
      orig_row_[i] = rows[i].orig;
      bound_var_[i] = rows[i].bound_var;
      if (rows[i].rel == Relation::kLessEqual) slack_coef[i] = sign;
      if (rows[i].rel == Relation::kGreaterEqual) slack_coef[i] = -sign;
    }
    // Flip structural coefficients of negated rows.
    for (auto& c : cols)
      for (auto& [row, v] : c) v *= row_sign_[row];

    for (int i = 0; i < m_; ++i) {
      if (slack_coef[i] == 0.0) continue;
      if (slack_coef[i] > 0.0) basis_[i] = static_cast<int>(cols.size());
      cols.push_back({{i, slack_coef[i]}});
      kind_.push_back(Kind::kSlack);
      struct_of_col_.push_back(-1);
      cost_.push_back(0.0);
    }
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= 0) continue;
      basis_[i] = static_cast<int>(cols.size());
      cols.push_back({{i, 1.0}});
      kind_.push_back(Kind::kArtificial);
      struct_of_col_.push_back(-1);
      cost_.push_back(0.0);
      ++num_artificial_;
    }

    n_ = static_cast<int>(cols.size());
    col_start_.reserve(n_ + 1);
    col_start_.push_back(0);
    for (const auto& c : cols) {
      for (const auto& [row, v] : c) {
        row_ind_.push_back(row);
        col_val_.push_back(v);
      }
      col_start_.push_back(static_cast<int>(row_ind_.size()));
    }

    for (int i = 0; i < m_; ++i)
      if (b_[i] != 0.0) b_nonzero_.push_back(i);

    pos_.assign(n_, -1);
    for (int i = 0; i < m_; ++i) pos_[basis_[i]] = i;
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    xb_ = b_;
    y_.assign(m_, 0.0);
    alpha_.assign(m_, 0.0);
  }

  [[nodiscard]] double* binv_row(int i) { return binv_.data() + static_cast<std::size_t>(i) * m_; }

  void refresh_primal() {
    for (int i = 0; i < m_; ++i) {
      const double* row = binv_row(i);
      double s = 0.0;
      for (const int k : b_nonzero_) s += row[k] * b_[k];
      xb_[i] = s;
    }
  }

  void refresh_duals(const std::vector<double>& cost) {
    std::fill(y_.begin(), y_.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = binv_row(i);
      for (int k = 0; k < m_; ++k) y_[k] += cb * row[k];
    }
  }

  [[nodiscard]] double reduced_cost(const std::vector<double>& cost, int j) const {
    double d = cost[j];
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) d -= y_[row_ind_[p]] * col_val_[p];
    return d;
  }

  void ftran(int j) {
    std::fill(alpha_.begin(), alpha_.end(), 0.0);
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
      const int k = row_ind_[p];
      const double v = col_val_[p];
      const double* col = binv_.data() + k;
      for (int i = 0; i < m_; ++i) alpha_[i] += col[static_cast<std::size_t>(i) * m_] * v;
    }
  }

  /// Basis change: column q enters at row r. `dq` is q's reduced cost.
  void pivot(int q, int r, double theta, double dq) {
    const double piv = alpha_[r];
    for (int i = 0; i < m_; ++i) xb_[i] -= theta * alpha_[i];
    xb_[r] = theta;

    double* rr = binv_row(r);
    if (dq != 0.0) {
      const double f = dq / piv;
      for (int k = 0; k < m_; ++k) y_[k] += f * rr[k];
    }
    const double inv = 1.0 / piv;
    // The pivot row of the inverse is mostly zero for these block structures.
    pivot_nz_.clear();
    for (int k = 0; k < m_; ++k) {
      if (rr[k] == 0.0) continue;
      rr[k] *= inv;
      pivot_nz_.push_back(k);
    }
    for (int i = 0; i < m_; ++i) {
      const double a = alpha_[i];
      if (i == r || a == 0.0) continue;
      double* ri = binv_row(i);
      for (const int k : pivot_nz_) ri[k] -= a * rr[k];
    }
    pos_[basis_[r]] = -1;
    basis_[r] = q;
    pos_[q] = r;
    ++iterations_;
  }

  Outcome iterate(const std::vector<double>& cost, std::size_t limit) {
    refresh_primal();
    refresh_duals(cost);
    std::size_t since_refresh = 0;
    std::size_t degenerate_run = 0;
    bool bland = false;

    while (true) {
      if (iterations_ >= limit) return Outcome::kLimit;
      if (since_refresh >= opt_.refresh_interval) {
        refresh_primal();
        refresh_duals(cost);
        since_refresh = 0;
      }

      int q = -1;
      double dq = -opt_.optimality_tolerance;
      for (int j = 0; j < n_; ++j) {
        if (pos_[j] >= 0 || kind_[j] == Kind::kArtificial) continue;
        const double d = reduced_cost(cost, j);
        if (d < dq) {
          q = j;
          dq = d;
          if (bland) break;
        }
      }
      if (q < 0) {
        if (since_refresh == 0) return Outcome::kOptimal;
        // Confirm optimality with freshly computed duals.
        refresh_primal();
        refresh_duals(cost);
        since_refresh = 0;
        continue;
      }

      ftran(q);

      double min_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (alpha_[i] > opt_.pivot_tolerance) {
          min_ratio = std::min(min_ratio, std::max(xb_[i], 0.0) / alpha_[i]);
        }
      }
      if (!std::isfinite(min_ratio)) {
        unbounded_col_ = q;
        return Outcome::kUnbounded;
      }
      const double tie = min_ratio + 1e-12 * (1.0 + min_ratio);
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (alpha_[i] <= opt_.pivot_tolerance) continue;
        if (std::max(xb_[i], 0.0) / alpha_[i] > tie) continue;
        if (r < 0) {
          r = i;
        } else if (bland ? basis_[i] < basis_[r] : alpha_[i] > alpha_[r]) {
          r = i;
        }
      }

      const double theta = std::max(xb_[r], 0.0) / alpha_[r];
      if (theta <= 1e-12) {
        if (++degenerate_run >= opt_.degenerate_switch) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      pivot(q, r, theta, dq);
      ++since_refresh;
    }
  }

  // Tries to replace every artificial by a structural or slack column while
  // keeping the basic solution nonnegative, which makes phase 1 unnecessary.
  // Equality rows of chained instances usually admit such a basis directly.
  // On failure the initial basis is restored and false returned.
  bool crash() {
    const auto basis0 = basis_;
    bool ok = true;
    for (int r = 0; r < m_ && ok; ++r) {
      if (kind_[basis_[r]] != Kind::kArtificial) continue;
      const double* rr = binv_row(r);
      int best = -1;
      double best_abs = 1e-7;
      for (int j = 0; j < n_; ++j) {
        if (pos_[j] >= 0 || kind_[j] == Kind::kArtificial) continue;
        double v = 0.0;
        for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) v += rr[row_ind_[p]] * col_val_[p];
        if (std::abs(v) < best_abs || xb_[r] / v < 0.0) continue;
        // Later columns win ties: in chained instances they carry the state forward.
        best_abs = std::abs(v);
        best = j;
      }
      if (best < 0) {
        ok = false;
        break;
      }
      ftran(best);
      pivot(best, r, xb_[r] / alpha_[r], 0.0);
    }
    if (ok) {
      refresh_primal();
      for (const double v : xb_) ok = ok && v >= -opt_.feasibility_tolerance;
    }
    if (ok) return true;

    basis_ = basis0;
    std::fill(pos_.begin(), pos_.end(), -1);
    for (int i = 0; i < m_; ++i) pos_[basis_[i]] = i;
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    xb_ = b_;
    iterations_ = 0;
    return false;
  }

  void drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (kind_[basis_[r]] != Kind::kArtificial) continue;
      const double* rr = binv_row(r);
      int best = -1;
      double best_abs = 1e-7;
      for (int j = 0; j < n_; ++j) {
        if (pos_[j] >= 0 || kind_[j] == Kind::kArtificial) continue;
        double v = 0.0;
        for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) v += rr[row_ind_[p]] * col_val_[p];
        if (std::abs(v) > best_abs) {
          best_abs = std::abs(v);
          best = j;
        }
      }
      if (best < 0) continue;  // redundant row; the artificial stays basic at zero
      ftran(best);
      pivot(best, r, xb_[r] / alpha_[r], 0.0);
    }
  }

  Solution& finish_limit(Solution& sol) {
    sol.status = Status::kIterationLimit;
    sol.iterations = iterations_;
    return sol;
  }

  Solution& extract(Solution& sol) {
    refresh_primal();
    refresh_duals(cost_);

    const int nv = inst_.num_vars();
    sol.primal.assign(inst_.lower.begin(), inst_.lower.end());
    for (int i = 0; i < m_; ++i) {
      const int var = struct_of_col_[basis_[i]];
      if (var >= 0) sol.primal[var] = inst_.lower[var] + std::max(xb_[i], 0.0);
    }
    for (int j = 0; j < nv; ++j) sol.primal[j] = std::min(sol.primal[j], inst_.upper[j]);

    sol.duals.assign(inst_.rows.size(), 0.0);
    double dual_obj = inst_.objective_offset;
    for (int j = 0; j < nv; ++j) dual_obj += inst_.objective[j] * inst_.lower[j];
    for (int i = 0; i < m_; ++i) {
      dual_obj += b_[i] * y_[i];
      if (orig_row_[i] >= 0) sol.duals[orig_row_[i]] = row_sign_[i] * y_[i];
    }

    sol.status = Status::kOptimal;
    sol.objective_value = inst_.objective_at(sol.primal);
    sol.dual_objective = dual_obj;
    sol.iterations = iterations_;
    if (inst_.horizon > 0 && nv >= static_cast<int>(FlowDecision::kSize)) {
      for (std::size_t k = 0; k < FlowDecision::kSize; ++k) sol.first_step[k] = sol.primal[k];
    }
    return sol;
  }
};

}  // namespace detail

/// Solves `inst` to an optimal basic solution. Never throws for infeasible
/// or unbounded instances; the status says so. Throws std::invalid_argument
/// for malformed instances.
[[nodiscard]] inline Solution solve(const Instance& inst, const SolverOptions& opt = {}) {
  inst.validate();
  return detail::RevisedSimplex(inst, opt).run();
}

}  // namespace ccd::lp
