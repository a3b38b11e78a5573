#pragma once

// Rolling-horizon simulation.
//
// At every step t = 0 .. T-H-1 the simulator builds the H-step LP from the
// forecast issued at t, executes the lead-1 decision against the realized
// values and advances storage. The LP solved at t = T-H covers the last H
// steps exactly; its whole plan is executed step by step, so every step of
// the year is accounted for and T = H reduces to a single LP.
//
// Executed flows pass through a repair pipeline before cost accounting:
//   1. wind deficit: cut e_wg, then e_wr, then e_wf (grid replaces it), then
//      e_wu (grid replaces it); surplus stays unused unless export is on
//   2. demand clamp: delivery above realized demand is removed from grid,
//      then storage, then wind/waste heat
//   3. discharge limits against the actual level (only bites on the final
//      plan, whose later leads assumed planned levels)
//   4. storage capacity: charge beyond R^max is dropped
//   5. foundry heat coupling re-checked after the cuts above

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "ccdispatch/error.hpp"
#include "ccdispatch/forecast.hpp"
#include "ccdispatch/lp/dispatch.hpp"
#include "ccdispatch/lp/simplex.hpp"
#include "ccdispatch/model.hpp"
#include "ccdispatch/parallel.hpp"
#include "ccdispatch/policy.hpp"
#include "ccdispatch/rng.hpp"

namespace ccd {

enum class RepairKind : std::uint8_t {
  kExportCut,
  kStorageCut,
  kFoundryShift,
  kUrbanShift,
  kSurplusUnused,
  kDemandClamp,
};

inline constexpr std::size_t kRepairKindCount = 6;

inline constexpr std::array<std::string_view, kRepairKindCount> kRepairNames = {
    "export_cut", "storage_cut", "foundry_shift", "urban_shift", "surplus_unused", "demand_clamp"};

[[nodiscard]] constexpr std::string_view to_string(RepairKind k) { return kRepairNames[static_cast<std::size_t>(k)]; }

/// Set of repair kinds applied to one step.
class RepairSet {
public:
  void add(RepairKind k) { bits_ |= bit(k); }
  [[nodiscard]] bool contains(RepairKind k) const { return (bits_ & bit(k)) != 0; }
  [[nodiscard]] bool empty() const { return bits_ == 0; }
  RepairSet& operator|=(RepairSet o) {
    bits_ |= o.bits_;
    return *this;
  }

  /// Names joined by '|', empty when nothing was repaired.
  [[nodiscard]] std::string to_string() const {
    std::string s;
    for (std::size_t k = 0; k < kRepairKindCount; ++k) {
      if ((bits_ & (1U << k)) == 0) continue;
      if (!s.empty()) s += '|';
      s += kRepairNames[k];
    }
    return s;
  }

  friend bool operator==(RepairSet, RepairSet) = default;

private:
  static constexpr std::uint8_t bit(RepairKind k) { return static_cast<std::uint8_t>(1U << static_cast<unsigned>(k)); }
  std::uint8_t bits_ = 0;
};

/// Number of steps on which each repair kind fired.
struct RepairCounts {
  std::array<std::size_t, kRepairKindCount> counts{};

  [[nodiscard]] std::size_t operator[](RepairKind k) const { return counts[static_cast<std::size_t>(k)]; }
  void record(RepairSet s) {
    for (std::size_t k = 0; k < kRepairKindCount; ++k)
      if (s.contains(static_cast<RepairKind>(k))) ++counts[k];
  }
  RepairCounts& operator+=(const RepairCounts& o) {
    for (std::size_t k = 0; k < kRepairKindCount; ++k) counts[k] += o.counts[k];
    return *this;
  }
  [[nodiscard]] std::size_t total() const {
    std::size_t n = 0;
    for (const auto c : counts) n += c;
    return n;
  }

  friend bool operator==(const RepairCounts&, const RepairCounts&) = default;
};

// ---------------------------------------------------------------------------
// Repairs

/// Wind deficits at or below this many kWh are left alone.
inline constexpr double kRepairTolerance = 1e-9;

struct WindRepair {
  FlowDecision flows;
  RepairSet kinds;
  /// Realized wind left over after the planned wind flows (0 on deficit).
  double surplus = 0.0;
};

namespace detail {

/// Lowers `v` by up to `amount`, returning what was taken.
inline double take(double& v, double amount) {
  const double d = std::min(v, amount);
  v -= d;
  return d;
}

}  // namespace detail

/// Reconciles planned wind flows with the realized wind. On a deficit the
/// wind flows are cut in the order e_wg, e_wr, e_wf, e_wu; cuts to the two
/// demand flows are replaced one-for-one from the grid, so deliveries are
/// preserved. A surplus is left unused or, with `export_surplus`, added to
/// e_wg.
[[nodiscard]] inline WindRepair feasibility_update(const FlowDecision& planned, double realized_wind,
                                                   bool export_surplus = false) {
  WindRepair out{planned, {}, 0.0};
  FlowDecision& x = out.flows;
  const double used = x.wind_use();

  if (used <= realized_wind + kRepairTolerance) {
    const double surplus = std::max(0.0, realized_wind - used);
    if (surplus > kRepairTolerance) {
      if (export_surplus) {
        x.e_wg += surplus;
      } else {
        out.surplus = surplus;
        out.kinds.add(RepairKind::kSurplusUnused);
      }
    }
    return out;
  }

  double deficit = used - std::max(0.0, realized_wind);
  if (const double cut = detail::take(x.e_wg, deficit); cut > 0.0) {
    deficit -= cut;
    out.kinds.add(RepairKind::kExportCut);
  }
  if (const double cut = detail::take(x.e_wr, deficit); cut > 0.0) {
    deficit -= cut;
    out.kinds.add(RepairKind::kStorageCut);
  }
  if (const double cut = detail::take(x.e_wf, deficit); cut > 0.0) {
    deficit -= cut;
    x.e_gf += cut;
    out.kinds.add(RepairKind::kFoundryShift);
  }
  if (const double cut = detail::take(x.e_wu, deficit); cut > 0.0) {
    x.e_gu += cut;
    out.kinds.add(RepairKind::kUrbanShift);
  }
  return out;
}

struct ExecutedStep {
  FlowDecision flows;
  RepairSet kinds;
  double surplus = 0.0;
};

namespace detail {

/// Removes `excess` delivered energy from (grid, storage, local) in that
/// order; storage delivery is `beta * discharge`.
inline bool clamp_delivery(double excess, double& grid, double& storage, double beta, double& local) {
  if (excess <= kRepairTolerance) return false;
  excess -= take(grid, excess);
  if (excess > 0.0) excess -= beta * take(storage, excess / beta);
  if (excess > 0.0) take(local, excess);
  return true;
}

}  // namespace detail

/// Full repair pipeline for one executed step (see the file comment).
[[nodiscard]] inline ExecutedStep execute_step(const FlowDecision& planned, const StorageState& s,
                                               const ExogenousRealization& exo, const SystemParams& p,
                                               bool export_surplus = false) {
  const WindRepair wind = feasibility_update(planned, exo.e_w, export_surplus);
  ExecutedStep out{wind.flows, wind.kinds, wind.surplus};
  FlowDecision& x = out.flows;

  // 2. demand clamp
  bool clamped = false;
  clamped |= detail::clamp_delivery(urban_electric_supply(x, p) - exo.d_eu, x.e_gu, x.e_ru, p.beta_e_d, x.e_wu);
  clamped |= detail::clamp_delivery(foundry_electric_supply(x, p) - exo.d_ef, x.e_gf, x.e_rf, p.beta_e_d, x.e_wf);
  clamped |= detail::clamp_delivery(urban_heat_supply(x, p) - exo.d_hu, x.h_gu, x.h_ru, p.beta_h_d, x.h_fu);
  if (clamped) out.kinds.add(RepairKind::kDemandClamp);

  // 3. discharge limits; lost storage delivery is bought from the grid
  {
    const double limit = std::max(0.0, std::min(p.gamma_e_d, s.r_e - p.r_e_min));
    double excess = x.electric_discharge() - limit;
    if (excess > kRepairTolerance) {
      out.kinds.add(RepairKind::kStorageCut);
      excess -= detail::take(x.e_rg, excess);
      if (excess > 0.0) {
        const double cut = detail::take(x.e_rf, excess);
        x.e_gf += p.beta_e_d * cut;
        excess -= cut;
      }
      if (excess > 0.0) x.e_gu += p.beta_e_d * detail::take(x.e_ru, excess);
    }
    const double limit_h = std::max(0.0, std::min(p.gamma_h_d, s.r_h - p.r_h_min));
    const double excess_h = x.h_ru - limit_h;
    if (excess_h > kRepairTolerance) {
      out.kinds.add(RepairKind::kStorageCut);
      x.h_gu += p.beta_h_d * detail::take(x.h_ru, excess_h);
    }
  }

  // 4. charge rates and storage capacity
  {
    double rate_cut = x.electric_charge() - p.gamma_e_c / p.beta_e_c;
    if (rate_cut > kRepairTolerance) {
      out.kinds.add(RepairKind::kStorageCut);
      rate_cut -= detail::take(x.e_gr, rate_cut);
      if (rate_cut > 0.0) detail::take(x.e_wr, rate_cut);
    }
    const double rate_cut_h = x.h_fr - p.gamma_h_c / p.beta_h_c;
    if (rate_cut_h > kRepairTolerance) {
      out.kinds.add(RepairKind::kStorageCut);
      detail::take(x.h_fr, rate_cut_h);
    }
    const double over = s.r_e + p.beta_e_c * x.electric_charge() - x.electric_discharge() - p.r_e_max;
    if (over > kRepairTolerance) {
      out.kinds.add(RepairKind::kStorageCut);
      double charge_cut = over / p.beta_e_c;
      charge_cut -= detail::take(x.e_gr, charge_cut);
      if (charge_cut > 0.0) detail::take(x.e_wr, charge_cut);
    }
    const double over_h = s.r_h + p.beta_h_c * x.h_fr - x.h_ru - p.r_h_max;
    if (over_h > kRepairTolerance) {
      out.kinds.add(RepairKind::kStorageCut);
      detail::take(x.h_fr, over_h / p.beta_h_c);
    }
  }

  // 5. waste heat cannot exceed what the foundry's electricity produces
  {
    double excess = x.h_fu + x.h_fr - p.delta_eh * foundry_electric_supply(x, p);
    if (excess > kRepairTolerance) {
      out.kinds.add(RepairKind::kDemandClamp);
      excess -= detail::take(x.h_fr, excess);
      if (excess > 0.0) detail::take(x.h_fu, excess);
    }
  }

  for (std::size_t k = 0; k < FlowDecision::kSize; ++k) x[k] = std::max(0.0, x[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

struct SimulationConfig {
  std::size_t horizon = 24;
  std::size_t steps = 8760;
  std::size_t replications = 10;
  PolicyParams policy;
  ScenarioConfig scenario;
  SystemParams params;
  bool surplus_export_enabled = false;
  /// Realized series to use instead of the synthetic generator; forecasts
  /// are still drawn around it with the scenario's forecast spreads.
  std::shared_ptr<const Trajectory> truth;

  /// Throws ConfigError with keys relative to their config section.
  void validate() const {
    if (horizon < 1) throw ConfigError("simulation.horizon", "must be >= 1");
    if (steps < horizon) throw ConfigError("simulation.steps", "must be >= horizon");
    if (replications < 1) throw ConfigError("simulation.replications", "must be >= 1");
    if (truth && truth->size() < steps) throw ConfigError("scenario.truth_csv", "has fewer rows than simulation.steps");
    try {
      params.validate();
    } catch (const ConfigError& e) {
      throw e.within("system");
    }
    try {
      scenario.validate();
    } catch (const ConfigError& e) {
      throw e.within("scenario");
    }
    try {
      policy.validate(horizon);
    } catch (const ConfigError& e) {
      throw e.within("policy");
    }
  }
};

/// Solver failure during a run; `step()` is the step being planned.
class SimulationError : public Error {
public:
  SimulationError(std::size_t step, const std::string& what)
      : Error(fmt::format("step {}: {}", step, what)), step_(step) {}
  [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

struct SimResult {
  double total_cost = 0.0;
  CostBreakdown cost_by_term;
  RepairCounts repair_events;
  /// Level after each step.
  std::vector<StorageState> storage_trace;
  std::vector<FlowDecision> executed_flows;
  std::vector<ExogenousRealization> realized;
  std::vector<double> step_costs;
  std::vector<RepairSet> repairs;
  std::size_t solves = 0;
  std::size_t simplex_iterations = 0;
};

/// Realized trajectory a run with this seed sees.
[[nodiscard]] inline Trajectory realized_truth(const SimulationConfig& cfg, std::uint64_t seed) {
  if (cfg.truth) return Trajectory(cfg.truth->begin(), cfg.truth->begin() + static_cast<std::ptrdiff_t>(cfg.steps));
  ScenarioConfig sc = cfg.scenario;
  sc.seed = seed;
  // Generated series are prefix-stable, so only the simulated steps are built.
  sc.year_length = cfg.steps;
  return generate_truth(sc);
}

/// The LP planned at step t of a run, exactly as the simulator builds it.
[[nodiscard]] inline lp::Instance plan_instance(const SimulationConfig& cfg, const Trajectory& truth, std::uint64_t seed,
                                                std::size_t t, const StorageState& state) {
  ScenarioConfig sc = cfg.scenario;
  sc.seed = seed;
  const PolicyView view = apply_policy(forecast_at(truth, t, cfg.horizon, sc), cfg.policy);
  return lp::build(view.bundle, view.alpha, state, cfg.params, cfg.horizon);
}

namespace detail {

/// Body of `run`. With `stop_at` set, returns right after building the LP of
/// that step, which is left in `*stopped`.
inline SimResult simulate(const SimulationConfig& cfg, std::uint64_t replication_seed,
                          std::optional<std::size_t> stop_at, lp::Instance* stopped) {
  cfg.validate();
  const SystemParams& p = cfg.params;
  const std::size_t T = cfg.steps;
  const std::size_t H = cfg.horizon;
  const Trajectory truth = realized_truth(cfg, replication_seed);

  SimResult res;
  res.storage_trace.reserve(T);
  res.executed_flows.reserve(T);
  res.realized.reserve(T);
  res.step_costs.reserve(T);
  res.repairs.reserve(T);

  StorageState state = p.initial_state();
  const auto plan = [&](std::size_t t) -> std::optional<lp::Solution> {
    lp::Instance inst = plan_instance(cfg, truth, replication_seed, t, state);
    if (stop_at && *stop_at == t) {
      *stopped = std::move(inst);
      return std::nullopt;
    }
    lp::Solution sol = lp::solve(inst);
    ++res.solves;
    res.simplex_iterations += sol.iterations;
    if (sol.status != lp::Status::kOptimal) {
      throw SimulationError(t, fmt::format("LP {} ({})", lp::to_string(sol.status), sol.hint));
    }
    return sol;
  };
  const auto execute = [&](const FlowDecision& planned, std::size_t t) {
    const ExogenousRealization& exo = truth[t];
    const ExecutedStep step = execute_step(planned, state, exo, p, cfg.surplus_export_enabled);
    const ViolationReport report = check_feasible(step.flows, state, exo, p);
    if (!report.empty()) {
      const Violation& v = report.violations.front();
      throw SimulationError(t, fmt::format("executed flows violate {} by {}", to_string(v.id), -v.slack));
    }
    const CostBreakdown c = step_cost(step.flows, exo, p);
    res.cost_by_term += c;
    res.total_cost += c.total;
    state = storage_step(state, step.flows, p);
    res.repair_events.record(step.kinds);
    res.storage_trace.push_back(state);
    res.executed_flows.push_back(step.flows);
    res.realized.push_back(exo);
    res.step_costs.push_back(c.total);
    res.repairs.push_back(step.kinds);
  };

  for (std::size_t t = 0; t + H < T; ++t) {
    const auto sol = plan(t);
    if (!sol) return res;
    execute(sol->first_step, t);
  }
  const std::size_t last = T - H;
  const auto tail = plan(last);
  if (!tail) return res;
  for (std::size_t lead = 1; lead <= H; ++lead) execute(lp::flows_at(tail->primal, lead), last + lead - 1);
  return res;
}

}  // namespace detail

/// One simulated year for `replication_seed`. Deterministic in its inputs.
[[nodiscard]] inline SimResult run(const SimulationConfig& cfg, std::uint64_t replication_seed) {
  return detail::simulate(cfg, replication_seed, std::nullopt, nullptr);
}

/// The LP a run with `replication_seed` solves at step `t` (0 <= t <= T-H),
/// including the storage state reached by then.
[[nodiscard]] inline lp::Instance instance_at(const SimulationConfig& cfg, std::uint64_t replication_seed,
                                              std::size_t t) {
  if (t + cfg.horizon > cfg.steps) {
    throw std::out_of_range(fmt::format("step {} has no full horizon within {} steps", t, cfg.steps));
  }
  lp::Instance inst;
  (void)detail::simulate(cfg, replication_seed, t, &inst);
  return inst;
}

/// Seed of replication `r` derived from the scenario seed.
[[nodiscard]] constexpr std::uint64_t replication_seed(std::uint64_t scenario_seed, std::size_t r) {
  return rng::hash_keys(scenario_seed, {static_cast<std::uint64_t>(rng::Stream::kReplication), r});
}

struct ReplicationSummary {
  double mean_cost = 0.0;
  /// Sample standard deviation (n - 1); 0 for one replication.
  double std_cost = 0.0;
  std::vector<double> totals;
  RepairCounts repair_events;
  CostBreakdown mean_cost_by_term;
};

/// Mean and standard deviation over the per-replication totals.
[[nodiscard]] inline ReplicationSummary summarize(std::vector<double> totals) {
  ReplicationSummary s;
  s.totals = std::move(totals);
  const auto n = static_cast<double>(s.totals.size());
  if (s.totals.empty()) return s;
  double sum = 0.0;
  for (const double v : s.totals) sum += v;
  s.mean_cost = sum / n;
  if (s.totals.size() > 1) {
    double ss = 0.0;
    for (const double v : s.totals) ss += (v - s.mean_cost) * (v - s.mean_cost);
    s.std_cost = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

/// Runs `cfg.replications` independent years on up to `jobs` threads.
[[nodiscard]] inline ReplicationSummary run_replications(const SimulationConfig& cfg, std::size_t jobs = 1,
                                                         std::vector<SimResult>* runs = nullptr) {
  cfg.validate();
  std::vector<SimResult> results(cfg.replications);
  parallel_for(cfg.replications, jobs, [&](std::size_t r) {
    try {
      results[r] = run(cfg, replication_seed(cfg.scenario.seed, r));
    } catch (const Error& e) {
      throw Error(fmt::format("replication {}: {}", r, e.what()));
    }
  });

  std::vector<double> totals;
  totals.reserve(results.size());
  for (const auto& r : results) totals.push_back(r.total_cost);
  ReplicationSummary s = summarize(std::move(totals));
  const double inv = 1.0 / static_cast<double>(results.size());
  for (const auto& r : results) {
    s.repair_events += r.repair_events;
    CostBreakdown c = r.cost_by_term;
    c.penalty_eu *= inv;
    c.penalty_hu *= inv;
    c.penalty_ef *= inv;
    c.grid_e_purchase *= inv;
    c.grid_h_purchase *= inv;
    c.export_revenue *= inv;
    c.lcos_e_cost *= inv;
    c.lcos_h_cost *= inv;
    c.total *= inv;
    s.mean_cost_by_term += c;
  }
  if (runs) *runs = std::move(results);
  return s;
}

/// Per-step trace: t, the flows, levels after the step, realized values,
/// step cost and the repairs applied. Shortest round-trip number format.
inline void write_trace(std::ostream& out, const SimResult& r) {
  out << "t";
  for (const auto name : FlowDecision::kNames) out << ',' << name;
  out << ",r_e,r_h";
  for (const auto name : kSeriesNames) out << ',' << name;
  out << ",cost_total,repair_flags\n";
  for (std::size_t t = 0; t < r.executed_flows.size(); ++t) {
    out << t;
    const FlowDecision& x = r.executed_flows[t];
    for (std::size_t k = 0; k < FlowDecision::kSize; ++k) out << fmt::format(",{}", x[k]);
    out << fmt::format(",{},{}", r.storage_trace[t].r_e, r.storage_trace[t].r_h);
    for (const Series s : kAllSeries) out << fmt::format(",{}", value_of(r.realized[t], s));
    out << fmt::format(",{},{}\n", r.step_costs[t], r.repairs[t].to_string());
  }
}

inline void write_trace(const std::string& path, const SimResult& r) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_trace(out, r);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace ccd
