#include <gtest/gtest.h>

#include <sstream>

#include "ccdispatch/sim.hpp"
#include "support/fixtures.hpp"

namespace ccd {
namespace {

FlowDecision planned_wind() {
  FlowDecision x;
  x.e_wu = x.e_wf = x.e_wr = x.e_wg = 5.0;
  return x;
}

TEST(FeasibilityUpdate, ExactBalance) {
  const WindRepair r = feasibility_update(planned_wind(), 20.0);
  EXPECT_EQ(r.flows, planned_wind());
  EXPECT_TRUE(r.kinds.empty());
}

TEST(FeasibilityUpdate, SurplusLeftUnused) {
  const WindRepair r = feasibility_update(planned_wind(), 25.0);
  EXPECT_EQ(r.flows, planned_wind());
  EXPECT_DOUBLE_EQ(r.surplus, 5.0);
  EXPECT_TRUE(r.kinds.contains(RepairKind::kSurplusUnused));
}

TEST(FeasibilityUpdate, SurplusExportedWhenEnabled) {
  const WindRepair r = feasibility_update(planned_wind(), 25.0, true);
  EXPECT_DOUBLE_EQ(r.flows.e_wg, 10.0);
  EXPECT_TRUE(r.kinds.empty());
}

TEST(FeasibilityUpdate, SmallDeficitCutsExportThenStorage) {
  const WindRepair r = feasibility_update(planned_wind(), 12.0);
  EXPECT_DOUBLE_EQ(r.flows.e_wg, 0.0);
  EXPECT_DOUBLE_EQ(r.flows.e_wr, 2.0);
  EXPECT_DOUBLE_EQ(r.flows.e_wf, 5.0);
  EXPECT_DOUBLE_EQ(r.flows.e_wu, 5.0);
  EXPECT_TRUE(r.kinds.contains(RepairKind::kExportCut));
  EXPECT_TRUE(r.kinds.contains(RepairKind::kStorageCut));
  EXPECT_FALSE(r.kinds.contains(RepairKind::kFoundryShift));
}

TEST(FeasibilityUpdate, FullCascade) {
  const WindRepair r = feasibility_update(planned_wind(), 3.0);
  EXPECT_DOUBLE_EQ(r.flows.e_wg, 0.0);
  EXPECT_DOUBLE_EQ(r.flows.e_wr, 0.0);
  EXPECT_DOUBLE_EQ(r.flows.e_wf, 0.0);
  EXPECT_DOUBLE_EQ(r.flows.e_gf, 5.0);
  EXPECT_DOUBLE_EQ(r.flows.e_wu, 3.0);
  EXPECT_DOUBLE_EQ(r.flows.e_gu, 2.0);
  EXPECT_EQ(r.kinds.to_string(), "export_cut|storage_cut|foundry_shift|urban_shift");
}

TEST(FeasibilityUpdate, PreservesDeliveriesAndRespectsWind) {
  rng::CounterRng g(17);
  for (int k = 0; k < 1000; ++k) {
    FlowDecision x;
    for (std::size_t i = 0; i < FlowDecision::kSize; ++i) x[i] = g.uniform(0, 10);
    const double wind = g.uniform(0, 50);
    const WindRepair r = feasibility_update(x, wind);
    EXPECT_LE(r.flows.wind_use(), wind + 1e-9);
    EXPECT_NEAR(r.flows.e_wu + r.flows.e_gu, x.e_wu + x.e_gu, 1e-9);
    EXPECT_NEAR(r.flows.e_wf + r.flows.e_gf, x.e_wf + x.e_gf, 1e-9);
    for (std::size_t i = 0; i < FlowDecision::kSize; ++i) EXPECT_GE(r.flows[i], 0.0);
  }
}

TEST(ExecuteStep, ClampsDeliveryToRealizedDemand) {
  FlowDecision x;
  x.e_gu = 10;
  x.e_wu = 5;
  const ExogenousRealization exo{100, 8, 0, 0, 0.1, 0.1};
  const ExecutedStep s = execute_step(x, {0, 0}, exo, SystemParams{});
  EXPECT_TRUE(s.kinds.contains(RepairKind::kDemandClamp));
  EXPECT_DOUBLE_EQ(s.flows.e_gu, 3.0);
  EXPECT_DOUBLE_EQ(s.flows.e_wu, 5.0);
}

TEST(ExecuteStep, RandomPlansBecomeFeasible) {
  rng::CounterRng g(23);
  const SystemParams p = SystemParams::for_houses(10);
  for (int k = 0; k < 2000; ++k) {
    FlowDecision x;
    for (std::size_t i = 0; i < FlowDecision::kSize; ++i) x[i] = g.uniform(0, 30);
    const StorageState s{g.uniform(p.r_e_min, p.r_e_max), g.uniform(p.r_h_min, p.r_h_max)};
    const ExogenousRealization exo{g.uniform(0, 100), g.uniform(0, 60), g.uniform(0, 60), g.uniform(0, 60), 0.1, 0.1};
    const ExecutedStep e = execute_step(x, s, exo, p);
    const ViolationReport r = check_feasible(e.flows, s, exo, p);
    EXPECT_TRUE(r.empty()) << k << " " << (r.empty() ? "" : std::string(to_string(r.violations[0].id)));
  }
}

TEST(SimulationConfig, ValidationKeys) {
  SimulationConfig c = fixtures::small_config(10, 24);
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "simulation.steps");
  }
  c = fixtures::small_config(48, 24);
  c.params.beta_e_c = -1;
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "system.beta_e_c");
  }
}

SimulationConfig noiseless(std::size_t steps, std::size_t horizon) {
  SimulationConfig c = fixtures::small_config(steps, horizon);
  for (auto& p : c.scenario.profiles) p.forecast_std = 0.0;
  c.scenario.forecast_growth = 0.0;
  return c;
}

TEST(Run, SingleHorizonEqualsOneShotLp) {
  const SimulationConfig c = noiseless(24, 24);
  const std::uint64_t seed = replication_seed(c.scenario.seed, 0);
  const SimResult r = run(c, seed);
  EXPECT_EQ(r.solves, 1u);
  ASSERT_EQ(r.executed_flows.size(), 24u);

  const Trajectory truth = realized_truth(c, seed);
  const lp::Solution s =
      lp::solve(lp::build(perfect_forecast(truth, 0, 24), std::nullopt, c.params.initial_state(), c.params, 24));
  ASSERT_EQ(s.status, lp::Status::kOptimal);
  EXPECT_NEAR(r.total_cost, s.objective_value, 1e-6 * std::fabs(s.objective_value));
  EXPECT_EQ(r.repair_events.total(), 0u);
}

TEST(Run, ZeroDemandZeroWindCostsNothing) {
  SimulationConfig c = fixtures::small_config(48, 12);
  c.scenario.make_deterministic();
  for (const Series s : {Series::e_w, Series::d_eu, Series::d_hu, Series::d_ef}) c.scenario.profile(s).base = 0.0;
  const SimResult r = run(c, 1);
  EXPECT_EQ(r.total_cost, 0.0);
  EXPECT_EQ(r.repair_events.total(), 0u);
}

TEST(Run, Deterministic) {
  const SimulationConfig c = fixtures::small_config(96, 12);
  const SimResult a = run(c, 42);
  const SimResult b = run(c, 42);
  EXPECT_EQ(a.total_cost, b.total_cost);
  EXPECT_EQ(a.executed_flows, b.executed_flows);
  EXPECT_EQ(a.step_costs, b.step_costs);
  EXPECT_EQ(a.repairs, b.repairs);
  EXPECT_NE(a.total_cost, run(c, 43).total_cost);
}

TEST(Run, AccountsEveryStep) {
  const SimulationConfig c = fixtures::small_config(100, 24);
  const SimResult r = run(c, 5);
  EXPECT_EQ(r.solves, 100u - 24u + 1u);
  EXPECT_EQ(r.executed_flows.size(), 100u);
  double sum = 0;
  for (const double v : r.step_costs) sum += v;
  EXPECT_NEAR(sum, r.total_cost, 1e-6 * std::fabs(r.total_cost));
  EXPECT_NEAR(r.cost_by_term.sum_of_terms(), r.total_cost, 1e-6 * std::fabs(r.total_cost));
  StorageState s = c.params.initial_state();
  for (std::size_t t = 0; t < r.executed_flows.size(); ++t) {
    EXPECT_TRUE(check_feasible(r.executed_flows[t], s, r.realized[t], c.params).empty()) << t;
    s = r.storage_trace[t];
    EXPECT_GE(s.r_e, c.params.r_e_min - 1e-6);
    EXPECT_LE(s.r_e, c.params.r_e_max + 1e-6);
  }
}

TEST(Run, SuppliedTruthIsUsed) {
  SimulationConfig c = noiseless(30, 6);
  auto truth = std::make_shared<Trajectory>(realized_truth(c, 99));
  c.truth = truth;
  const SimResult a = run(c, 1);
  const SimResult b = run(c, 2);
  EXPECT_EQ(a.total_cost, b.total_cost);
  EXPECT_EQ(a.realized.front(), truth->front());
}

TEST(InstanceAt, MatchesPlannedLp) {
  const SimulationConfig c = fixtures::small_config(60, 12);
  const lp::Instance first = instance_at(c, 7, 0);
  EXPECT_EQ(first.num_vars(), 12 * lp::kVarsPerLead);
  EXPECT_NO_THROW((void)instance_at(c, 7, 48));
  EXPECT_THROW((void)instance_at(c, 7, 49), std::out_of_range);
}

TEST(Replications, SingleHasZeroStd) {
  SimulationConfig c = fixtures::small_config(48, 12);
  const ReplicationSummary s = run_replications(c);
  ASSERT_EQ(s.totals.size(), 1u);
  EXPECT_EQ(s.mean_cost, s.totals[0]);
  EXPECT_EQ(s.std_cost, 0.0);
}

TEST(Replications, NoiselessFixedTruthHasZeroStd) {
  SimulationConfig c = noiseless(48, 12);
  c.truth = std::make_shared<Trajectory>(realized_truth(c, 3));
  c.replications = 4;
  EXPECT_EQ(run_replications(c, 2).std_cost, 0.0);
}

TEST(Replications, ParallelMatchesSerial) {
  SimulationConfig c = fixtures::small_config(48, 12);
  c.replications = 4;
  const ReplicationSummary a = run_replications(c, 1);
  const ReplicationSummary b = run_replications(c, 3);
  EXPECT_EQ(a.totals, b.totals);
  EXPECT_EQ(a.repair_events, b.repair_events);
}

TEST(Replications, TenAgreeWithFifty) {
  SimulationConfig c = fixtures::small_config(120, 12);
  c.replications = 50;
  const ReplicationSummary fifty = run_replications(c);
  c.replications = 10;
  const ReplicationSummary ten = run_replications(c);
  EXPECT_GT(ten.std_cost, 0.0);
  EXPECT_LE(std::fabs(ten.mean_cost - fifty.mean_cost), 3.0 * ten.std_cost / std::sqrt(10.0));
}

TEST(Trace, HeaderAndRows) {
  const SimResult r = run(fixtures::small_config(30, 6), 1);
  std::ostringstream out;
  write_trace(out, r);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("t,e_wu,", 0), 0u);
  EXPECT_NE(header.find("cost_total,repair_flags"), std::string::npos);
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 30u);
}

TEST(RepairCounts, Aggregate) {
  RepairSet s;
  s.add(RepairKind::kExportCut);
  s.add(RepairKind::kDemandClamp);
  RepairCounts c;
  c.record(s);
  c.record(s);
  RepairCounts d;
  d.record(RepairSet{});
  d += c;
  EXPECT_EQ(d[RepairKind::kExportCut], 2u);
  EXPECT_EQ(d.total(), 4u);
}

}  // namespace
}  // namespace ccd
