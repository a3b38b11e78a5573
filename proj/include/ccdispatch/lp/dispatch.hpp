#pragma once

// Horizon-H dispatch LP.
//
// Variables, per lead l = 1..H in blocks of 16: the 14 flows in FlowDecision
// order followed by the storage levels r_e@l and r_h@l at the start of the
// lead. Level variables of lead 1 are pinned to the current state by the
// rows fix_re / fix_rh.
//
// Rows per lead (labels carry the lead after '@'):
//   9a   wind use <= available wind
//   9bg  electric discharge <= discharge rate
//   9bl  electric discharge - r_e@l <= -R_e^min
//   9c   beta_e^c * electric charge <= charge rate
//   9d   urban electricity delivered <= urban demand
//   9e   foundry electricity delivered <= foundry demand
//   9fg  thermal discharge <= discharge rate
//   9fl  thermal discharge - r_h@l <= -R_h^min
//   9g   beta_h^c * thermal charge <= charge rate
//   9h   urban heat delivered <= heat demand
//   9i   foundry heat use <= delta_eh * foundry electricity delivered
//   10a  r_e@l+1 = r_e@l + charge - discharge     (l < H)
//   10b  r_h@l+1 = r_h@l + charge - discharge     (l < H)
//   10c  level after lead l <= R_e^max
//   10d  level after lead l <= R_h^max
// The minimum of rate and level in the discharge limits is split into the
// two rows g/l. The objective sums the per-step cost over all leads with
// the penalty constants C_P * D carried in objective_offset.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "ccdispatch/forecast.hpp"
#include "ccdispatch/lp/instance.hpp"
#include "ccdispatch/model.hpp"
#include "ccdispatch/policy.hpp"

namespace ccd::lp {

inline constexpr int kVarsPerLead = 16;
inline constexpr int kLevelE = 14;
inline constexpr int kLevelH = 15;

/// Column of `flow` at `lead` (1-based).
[[nodiscard]] constexpr int flow_var(std::size_t lead, Flow flow) {
  return static_cast<int>(lead - 1) * kVarsPerLead + static_cast<int>(flow);
}
[[nodiscard]] constexpr int level_e_var(std::size_t lead) {
  return static_cast<int>(lead - 1) * kVarsPerLead + kLevelE;
}
[[nodiscard]] constexpr int level_h_var(std::size_t lead) {
  return static_cast<int>(lead - 1) * kVarsPerLead + kLevelH;
}

/// Right-hand side for the random upper bound of `series` at `lead`:
/// the tightened bound when an alpha schedule is given, the mean otherwise,
/// floored at zero.
[[nodiscard]] inline double random_rhs(const ForecastBundle& bundle, const std::optional<LeadSchedule>& alpha,
                                       Series series, std::size_t lead) {
  const GaussianMarginal& g = bundle.marginal(series, lead);
  const BoundSense sense = series == Series::e_w ? BoundSense::kSupplyUpper : BoundSense::kDemandUpper;
  const double v = alpha ? tighten_bound(g, alpha->at_lead(lead), sense) : g.mu;
  return v > 0.0 ? v : 0.0;
}

/// Assembles the dispatch LP for `horizon` leads of `bundle`.
[[nodiscard]] inline Instance build(const ForecastBundle& bundle, const std::optional<LeadSchedule>& alpha,
                                    const StorageState& state, const SystemParams& p, std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("build: horizon must be >= 1");
  if (bundle.horizon != horizon) throw std::invalid_argument("build: bundle horizon != H");
  bundle.validate();
  if (alpha && alpha->size() != horizon) throw std::invalid_argument("build: alpha schedule length != H");

  Instance lp;
  lp.horizon = horizon;
  const std::size_t nvars = horizon * kVarsPerLead;
  lp.var_names.reserve(nvars);
  lp.objective.reserve(nvars);
  lp.rows.reserve(horizon * 15 + 2);

  for (std::size_t lead = 1; lead <= horizon; ++lead) {
    const double p_eg = bundle.marginal(Series::p_eg, lead).mu;
    const double p_hg = bundle.marginal(Series::p_hg, lead).mu;
    const std::string at = "@" + std::to_string(lead);

    const double cost[FlowDecision::kSize] = {
        -p.c_p_eu,                          // e_wu
        -p.c_p_ef,                          // e_wf
        0.0,                                // e_wr
        -p_eg,                              // e_wg
        p.lcos_e - p.c_p_eu * p.beta_e_d,   // e_ru
        p.lcos_e - p.c_p_ef * p.beta_e_d,   // e_rf
        p.lcos_e - p_eg * p.beta_e_d,       // e_rg
        p_eg - p.c_p_eu,                    // e_gu
        p_eg - p.c_p_ef,                    // e_gf
        p_eg,                               // e_gr
        -p.c_p_hu,                          // h_fu
        p_hg - p.c_p_hu,                    // h_gu
        0.0,                                // h_fr
        p.lcos_h - p.c_p_hu * p.beta_h_d,   // h_ru
    };
    for (std::size_t k = 0; k < FlowDecision::kSize; ++k) {
      lp.add_var(std::string(FlowDecision::kNames[k]) + at, cost[k]);
    }
    lp.add_var("r_e" + at, 0.0);
    lp.add_var("r_h" + at, 0.0);

    lp.objective_offset += p.c_p_eu * bundle.marginal(Series::d_eu, lead).mu +
                           p.c_p_hu * bundle.marginal(Series::d_hu, lead).mu +
                           p.c_p_ef * bundle.marginal(Series::d_ef, lead).mu;
  }

  {
    Row& r = lp.add_row("fix_re", Relation::kEqual, state.r_e);
    r.index = {level_e_var(1)};
    r.value = {1.0};
    Row& h = lp.add_row("fix_rh", Relation::kEqual, state.r_h);
    h.index = {level_h_var(1)};
    h.value = {1.0};
  }

  for (std::size_t lead = 1; lead <= horizon; ++lead) {
    const std::string at = "@" + std::to_string(lead);
    const auto v = [lead](Flow f) { return flow_var(lead, f); };
    const int re = level_e_var(lead);
    const int rh = level_h_var(lead);
    const auto row = [&lp](const std::string& label, Relation rel, double rhs, std::vector<int> idx,
                           std::vector<double> val) {
      Row& r = lp.add_row(label, rel, rhs);
      r.index = std::move(idx);
      r.value = std::move(val);
    };
    using F = Flow;
    constexpr auto LE = Relation::kLessEqual;

    row("9a" + at, LE, random_rhs(bundle, alpha, Series::e_w, lead), {v(F::e_wu), v(F::e_wf), v(F::e_wr), v(F::e_wg)},
        {1.0, 1.0, 1.0, 1.0});
    row("9bg" + at, LE, p.gamma_e_d, {v(F::e_ru), v(F::e_rf), v(F::e_rg)}, {1.0, 1.0, 1.0});
    row("9bl" + at, LE, 0.0 - p.r_e_min, {v(F::e_ru), v(F::e_rf), v(F::e_rg), re}, {1.0, 1.0, 1.0, -1.0});
    row("9c" + at, LE, p.gamma_e_c, {v(F::e_wr), v(F::e_gr)}, {p.beta_e_c, p.beta_e_c});
    row("9d" + at, LE, random_rhs(bundle, alpha, Series::d_eu, lead), {v(F::e_wu), v(F::e_ru), v(F::e_gu)},
        {1.0, p.beta_e_d, 1.0});
    row("9e" + at, LE, random_rhs(bundle, alpha, Series::d_ef, lead), {v(F::e_wf), v(F::e_rf), v(F::e_gf)},
        {1.0, p.beta_e_d, 1.0});
    row("9fg" + at, LE, p.gamma_h_d, {v(F::h_ru)}, {1.0});
    row("9fl" + at, LE, 0.0 - p.r_h_min, {v(F::h_ru), rh}, {1.0, -1.0});
    row("9g" + at, LE, p.gamma_h_c, {v(F::h_fr)}, {p.beta_h_c});
    row("9h" + at, LE, random_rhs(bundle, alpha, Series::d_hu, lead), {v(F::h_fu), v(F::h_gu), v(F::h_ru)},
        {1.0, 1.0, p.beta_h_d});
    row("9i" + at, LE, 0.0, {v(F::h_fu), v(F::h_fr), v(F::e_wf), v(F::e_rf), v(F::e_gf)},
        {1.0, 1.0, -p.delta_eh, -(p.delta_eh * p.beta_e_d), -p.delta_eh});
    if (lead < horizon) {
      row("10a" + at, Relation::kEqual, 0.0,
          {level_e_var(lead + 1), re, v(F::e_wr), v(F::e_gr), v(F::e_ru), v(F::e_rf), v(F::e_rg)},
          {1.0, -1.0, -p.beta_e_c, -p.beta_e_c, 1.0, 1.0, 1.0});
      row("10b" + at, Relation::kEqual, 0.0, {level_h_var(lead + 1), rh, v(F::h_fr), v(F::h_ru)},
          {1.0, -1.0, -p.beta_h_c, 1.0});
    }
    row("10c" + at, LE, p.r_e_max, {re, v(F::e_wr), v(F::e_gr), v(F::e_ru), v(F::e_rf), v(F::e_rg)},
        {1.0, p.beta_e_c, p.beta_e_c, -1.0, -1.0, -1.0});
    row("10d" + at, LE, p.r_h_max, {rh, v(F::h_fr), v(F::h_ru)}, {1.0, p.beta_h_c, -1.0});
  }

  lp.validate();
  return lp;
}

/// Flows of lead `lead` from a primal vector of a dispatch instance.
[[nodiscard]] inline FlowDecision flows_at(const std::vector<double>& primal, std::size_t lead) {
  FlowDecision x;
  for (std::size_t k = 0; k < FlowDecision::kSize; ++k) {
    x[k] = primal.at(static_cast<std::size_t>(flow_var(lead, static_cast<Flow>(k))));
  }
  return x;
}

}  // namespace ccd::lp
