#pragma once

// Five-node energy system: wind (w), urban (u), foundry (f), storage (r) and
// grid (g). All flows are energy per one-hour step in kWh, so rate limits in
// kW and energies in kWh are numerically interchangeable.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ccdispatch/error.hpp"

namespace ccd {

/// The 14 flow decisions of one timestep. Electric flows first, then heat.
struct FlowDecision {
  double e_wu = 0.0;  ///< wind -> urban
  double e_wf = 0.0;  ///< wind -> foundry
  double e_wr = 0.0;  ///< wind -> storage
  double e_wg = 0.0;  ///< wind -> grid (export)
  double e_ru = 0.0;  ///< storage -> urban
  double e_rf = 0.0;  ///< storage -> foundry
  double e_rg = 0.0;  ///< storage -> grid (export)
  double e_gu = 0.0;  ///< grid -> urban
  double e_gf = 0.0;  ///< grid -> foundry
  double e_gr = 0.0;  ///< grid -> storage
  double h_fu = 0.0;  ///< foundry waste heat -> urban
  double h_gu = 0.0;  ///< grid heat -> urban
  double h_fr = 0.0;  ///< foundry waste heat -> thermal storage
  double h_ru = 0.0;  ///< thermal storage -> urban

  static constexpr std::size_t kSize = 14;

  static constexpr std::array<double FlowDecision::*, kSize> kFields = {
      &FlowDecision::e_wu, &FlowDecision::e_wf, &FlowDecision::e_wr, &FlowDecision::e_wg,
      &FlowDecision::e_ru, &FlowDecision::e_rf, &FlowDecision::e_rg, &FlowDecision::e_gu,
      &FlowDecision::e_gf, &FlowDecision::e_gr, &FlowDecision::h_fu, &FlowDecision::h_gu,
      &FlowDecision::h_fr, &FlowDecision::h_ru};

  static constexpr std::array<std::string_view, kSize> kNames = {
      "e_wu", "e_wf", "e_wr", "e_wg", "e_ru", "e_rf", "e_rg",
      "e_gu", "e_gf", "e_gr", "h_fu", "h_gu", "h_fr", "h_ru"};

  double& operator[](std::size_t i) { return this->*kFields[i]; }
  double operator[](std::size_t i) const { return this->*kFields[i]; }

  [[nodiscard]] double wind_use() const { return e_wu + e_wf + e_wr + e_wg; }
  [[nodiscard]] double electric_discharge() const { return e_ru + e_rf + e_rg; }
  [[nodiscard]] double electric_charge() const { return e_wr + e_gr; }

  friend bool operator==(const FlowDecision&, const FlowDecision&) = default;
};

/// Field index of a FlowDecision member, usable in constant expressions.
enum class Flow : std::size_t {
  e_wu, e_wf, e_wr, e_wg, e_ru, e_rf, e_rg, e_gu, e_gf, e_gr, h_fu, h_gu, h_fr, h_ru
};

struct StorageState {
  double r_e = 0.0;  ///< electric storage level, kWh
  double r_h = 0.0;  ///< thermal storage level, kWh

  friend bool operator==(const StorageState&, const StorageState&) = default;
};

/// Plant constants. Defaults reproduce the reference system with 10000
/// households; penalty costs are not part of that reference and default to
/// values above typical grid prices so serving demand is always preferred.
struct SystemParams {
  double n_houses = 10000;

  double r_e_max = 100000.0;
  double r_e_min = 0.0;
  double r_e_0 = 0.0;
  double r_h_max = 100000.0;
  double r_h_min = 0.0;
  double r_h_0 = 0.0;

  double beta_e_c = 0.9;
  double beta_e_d = 0.9;
  double beta_h_c = 0.9;
  double beta_h_d = 0.9;

  double gamma_e_c = 10000.0;
  double gamma_e_d = 10000.0;
  double gamma_h_c = 10000.0;
  double gamma_h_d = 10000.0;

  double lcos_e = 0.05;
  double lcos_h = 0.01;
  double delta_eh = 0.5;

  double c_p_eu = 0.50;
  double c_p_hu = 0.20;
  double c_p_ef = 0.50;

  /// Reference parameters for `houses` households: capacities 10 kWh per
  /// household, rate limits a tenth of capacity.
  [[nodiscard]] static SystemParams for_houses(double houses) {
    SystemParams p;
    p.n_houses = houses;
    p.r_e_max = 10.0 * houses;
    p.r_h_max = 10.0 * houses;
    p.gamma_e_c = p.gamma_e_d = p.r_e_max / 10.0;
    p.gamma_h_c = p.gamma_h_d = p.r_h_max / 10.0;
    return p;
  }

  [[nodiscard]] StorageState initial_state() const { return {r_e_0, r_h_0}; }

  /// Throws ConfigError naming the offending field (without section prefix).
  void validate() const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Realized values of the six uncertain series for one step.
struct ExogenousRealization {
  double e_w = 0.0;   ///< wind energy available, kWh
  double d_eu = 0.0;  ///< urban electricity demand, kWh
  double d_hu = 0.0;  ///< urban heat demand, kWh
  double d_ef = 0.0;  ///< foundry electricity demand, kWh
  double p_eg = 0.0;  ///< grid electricity price, EUR/kWh (may be negative)
  double p_hg = 0.0;  ///< grid heat price, EUR/kWh

  friend bool operator==(const ExogenousRealization&, const ExogenousRealization&) = default;
};

/// One entry per term of the operating cost.
struct CostBreakdown {
  double penalty_eu = 0.0;
  double penalty_hu = 0.0;
  double penalty_ef = 0.0;
  double grid_e_purchase = 0.0;
  double grid_h_purchase = 0.0;
  double export_revenue = 0.0;
  double lcos_e_cost = 0.0;
  double lcos_h_cost = 0.0;
  double total = 0.0;

  CostBreakdown& operator+=(const CostBreakdown& o) {
    penalty_eu += o.penalty_eu;
    penalty_hu += o.penalty_hu;
    penalty_ef += o.penalty_ef;
    grid_e_purchase += o.grid_e_purchase;
    grid_h_purchase += o.grid_h_purchase;
    export_revenue += o.export_revenue;
    lcos_e_cost += o.lcos_e_cost;
    lcos_h_cost += o.lcos_h_cost;
    total += o.total;
    return *this;
  }

  [[nodiscard]] double sum_of_terms() const {
    return penalty_eu + penalty_hu + penalty_ef + grid_e_purchase + grid_h_purchase -
           export_revenue + lcos_e_cost + lcos_h_cost;
  }
};

// ---------------------------------------------------------------------------
// Delivered energy per demand node (what the demand caps constrain).

[[nodiscard]] inline double urban_electric_supply(const FlowDecision& x, const SystemParams& p) {
  return x.e_wu + p.beta_e_d * x.e_ru + x.e_gu;
}
[[nodiscard]] inline double foundry_electric_supply(const FlowDecision& x, const SystemParams& p) {
  return x.e_wf + p.beta_e_d * x.e_rf + x.e_gf;
}
[[nodiscard]] inline double urban_heat_supply(const FlowDecision& x, const SystemParams& p) {
  return x.h_fu + x.h_gu + p.beta_h_d * x.h_ru;
}

namespace detail {

inline void require_finite(double v, std::string_view what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " is not finite");
}

inline void require_finite(const FlowDecision& x) {
  for (std::size_t i = 0; i < FlowDecision::kSize; ++i) require_finite(x[i], FlowDecision::kNames[i]);
}

inline void require_finite(const ExogenousRealization& e) {
  require_finite(e.e_w, "e_w");
  require_finite(e.d_eu, "d_eu");
  require_finite(e.d_hu, "d_hu");
  require_finite(e.d_ef, "d_ef");
  require_finite(e.p_eg, "p_eg");
  require_finite(e.p_hg, "p_hg");
}

}  // namespace detail

inline void SystemParams::validate() const {
  const auto finite_nonneg = [](double v, const char* key) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(key, "must be finite and >= 0");
  };
  const auto efficiency = [](double v, const char* key) {
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError(key, "efficiency must lie in (0, 1]");
  };
  finite_nonneg(n_houses, "n_houses");
  finite_nonneg(r_e_max, "r_e_max");
  finite_nonneg(r_e_min, "r_e_min");
  finite_nonneg(r_e_0, "r_e_0");
  finite_nonneg(r_h_max, "r_h_max");
  finite_nonneg(r_h_min, "r_h_min");
  finite_nonneg(r_h_0, "r_h_0");
  efficiency(beta_e_c, "beta_e_c");
  efficiency(beta_e_d, "beta_e_d");
  efficiency(beta_h_c, "beta_h_c");
  efficiency(beta_h_d, "beta_h_d");
  finite_nonneg(gamma_e_c, "gamma_e_c");
  finite_nonneg(gamma_e_d, "gamma_e_d");
  finite_nonneg(gamma_h_c, "gamma_h_c");
  finite_nonneg(gamma_h_d, "gamma_h_d");
  finite_nonneg(lcos_e, "lcos_e");
  finite_nonneg(lcos_h, "lcos_h");
  efficiency(delta_eh, "delta_eh");
  finite_nonneg(c_p_eu, "c_p_eu");
  finite_nonneg(c_p_hu, "c_p_hu");
  finite_nonneg(c_p_ef, "c_p_ef");
  if (r_e_min > r_e_0 || r_e_0 > r_e_max) throw ConfigError("r_e_0", "must satisfy r_e_min <= r_e_0 <= r_e_max");
  if (r_h_min > r_h_0 || r_h_0 > r_h_max) throw ConfigError("r_h_0", "must satisfy r_h_min <= r_h_0 <= r_h_max");
}

// ---------------------------------------------------------------------------
// Cost

/// Realized cost of one step. Penalties are charged on demand minus delivered
/// energy without clamping; the demand caps keep that difference >= 0 for
/// feasible flows.
[[nodiscard]] inline CostBreakdown step_cost(const FlowDecision& x, const ExogenousRealization& exo,
                                             const SystemParams& p) {
  detail::require_finite(x);
  detail::require_finite(exo);

  CostBreakdown c;
  c.penalty_eu = p.c_p_eu * (exo.d_eu - x.e_wu - p.beta_e_d * x.e_ru - x.e_gu);
  c.penalty_hu = p.c_p_hu * (exo.d_hu - x.h_fu - x.h_gu - p.beta_h_d * x.h_ru);
  c.penalty_ef = p.c_p_ef * (exo.d_ef - x.e_wf - p.beta_e_d * x.e_rf - x.e_gf);
  c.grid_e_purchase = exo.p_eg * (x.e_gu + x.e_gf + x.e_gr);
  c.grid_h_purchase = exo.p_hg * x.h_gu;
  c.export_revenue = exo.p_eg * (p.beta_e_d * x.e_rg + x.e_wg);
  c.lcos_e_cost = p.lcos_e * (x.e_rf + x.e_rg + x.e_ru);
  c.lcos_h_cost = p.lcos_h * x.h_ru;
  c.total = c.sum_of_terms();
  return c;
}

// ---------------------------------------------------------------------------
// Storage dynamics

/// Thrown when a storage update leaves [R^min, R^max].
class StorageBoundError : public Error {
public:
  StorageBoundError(std::string storage, double level, double bound)
      : Error(storage + " storage level " + std::to_string(level) + " outside bound " +
              std::to_string(bound) + " by " + std::to_string(std::abs(level - bound))),
        storage_(std::move(storage)), level_(level), bound_(bound) {}

  [[nodiscard]] const std::string& storage() const noexcept { return storage_; }
  [[nodiscard]] double level() const noexcept { return level_; }
  [[nodiscard]] double bound() const noexcept { return bound_; }
  [[nodiscard]] double excess() const noexcept { return std::abs(level_ - bound_); }

private:
  std::string storage_;
  double level_;
  double bound_;
};

/// Absolute tolerance on storage bounds; levels within it are snapped onto
/// the bound.
inline constexpr double kStorageTolerance = 1e-6;

namespace detail {

inline double bounded_level(const char* which, double level, double lo, double hi) {
  if (level < lo) {
    if (level < lo - kStorageTolerance) throw StorageBoundError(which, level, lo);
    return lo;
  }
  if (level > hi) {
    if (level > hi + kStorageTolerance) throw StorageBoundError(which, level, hi);
    return hi;
  }
  return level;
}

}  // namespace detail

/// Storage levels after executing `x` for one step. Discharge is withdrawn
/// unscaled; efficiency losses apply on charge and at the delivery side.
[[nodiscard]] inline StorageState storage_step(const StorageState& s, const FlowDecision& x,
                                               const SystemParams& p) {
  const double r_e = s.r_e + p.beta_e_c * (x.e_wr + x.e_gr) - (x.e_ru + x.e_rf + x.e_rg);
  const double r_h = s.r_h + p.beta_h_c * x.h_fr - x.h_ru;
  return {detail::bounded_level("electric", r_e, p.r_e_min, p.r_e_max),
          detail::bounded_level("thermal", r_h, p.r_h_min, p.r_h_max)};
}

// ---------------------------------------------------------------------------
// Feasibility diagnostics

enum class ConstraintId { k9a, k9b, k9c, k9d, k9e, k9f, k9g, k9h, k9i, k10c, k10d, kNonNegative };

[[nodiscard]] constexpr std::string_view to_string(ConstraintId id) {
  switch (id) {
    case ConstraintId::k9a: return "9a";
    case ConstraintId::k9b: return "9b";
    case ConstraintId::k9c: return "9c";
    case ConstraintId::k9d: return "9d";
    case ConstraintId::k9e: return "9e";
    case ConstraintId::k9f: return "9f";
    case ConstraintId::k9g: return "9g";
    case ConstraintId::k9h: return "9h";
    case ConstraintId::k9i: return "9i";
    case ConstraintId::k10c: return "10c";
    case ConstraintId::k10d: return "10d";
    case ConstraintId::kNonNegative: return "nonneg";
  }
  return "?";
}

/// One violated `lhs <= bound` (or `lhs >= bound` for lower storage limits).
/// `slack` is negative by the amount of the violation.
struct Violation {
  ConstraintId id;
  double lhs;
  double bound;
  double slack;
};

struct ViolationReport {
  std::vector<Violation> violations;

  [[nodiscard]] bool empty() const { return violations.empty(); }
  [[nodiscard]] bool contains(ConstraintId id) const {
    for (const auto& v : violations)
      if (v.id == id) return true;
    return false;
  }
  [[nodiscard]] const Violation* find(ConstraintId id) const {
    for (const auto& v : violations)
      if (v.id == id) return &v;
    return nullptr;
  }
};

inline constexpr double kFeasibilityTolerance = 1e-6;

/// Checks one step of flows against every per-step constraint: wind
/// availability, storage rate and level limits, demand caps, foundry heat
/// coupling and the capacity of the storage level reached after the step.
/// The heat demand cap uses the thermal discharge term beta_h^d * h_ru.
[[nodiscard]] inline ViolationReport check_feasible(const FlowDecision& x, const StorageState& s,
                                                    const ExogenousRealization& exo,
                                                    const SystemParams& p) {
  ViolationReport report;
  const auto upper = [&](ConstraintId id, double lhs, double bound) {
    if (lhs > bound + kFeasibilityTolerance) report.violations.push_back({id, lhs, bound, bound - lhs});
  };
  const auto lower = [&](ConstraintId id, double lhs, double bound) {
    if (lhs < bound - kFeasibilityTolerance) report.violations.push_back({id, lhs, bound, lhs - bound});
  };

  for (std::size_t i = 0; i < FlowDecision::kSize; ++i) lower(ConstraintId::kNonNegative, x[i], 0.0);

  upper(ConstraintId::k9a, x.e_wu + x.e_wf + x.e_wr + x.e_wg, exo.e_w);
  upper(ConstraintId::k9b, x.e_ru + x.e_rf + x.e_rg, p.gamma_e_d);
  upper(ConstraintId::k9b, x.e_ru + x.e_rf + x.e_rg, s.r_e - p.r_e_min);
  upper(ConstraintId::k9c, p.beta_e_c * (x.e_wr + x.e_gr), p.gamma_e_c);
  upper(ConstraintId::k9d, urban_electric_supply(x, p), exo.d_eu);
  upper(ConstraintId::k9e, foundry_electric_supply(x, p), exo.d_ef);
  upper(ConstraintId::k9f, x.h_ru, p.gamma_h_d);
  upper(ConstraintId::k9f, x.h_ru, s.r_h - p.r_h_min);
  upper(ConstraintId::k9g, p.beta_h_c * x.h_fr, p.gamma_h_c);
  upper(ConstraintId::k9h, urban_heat_supply(x, p), exo.d_hu);
  upper(ConstraintId::k9i, x.h_fu + x.h_fr, p.delta_eh * foundry_electric_supply(x, p));

  const double next_e = s.r_e + p.beta_e_c * (x.e_wr + x.e_gr) - (x.e_ru + x.e_rf + x.e_rg);
  const double next_h = s.r_h + p.beta_h_c * x.h_fr - x.h_ru;
  upper(ConstraintId::k10c, next_e, p.r_e_max);
  lower(ConstraintId::k10c, next_e, p.r_e_min);
  upper(ConstraintId::k10d, next_h, p.r_h_max);
  lower(ConstraintId::k10d, next_h, p.r_h_min);
  return report;
}

}  // namespace ccd
