// Command-line front end: simulate, gridsearch, export-lp, generate-scenario.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.
// Every command ends its standard output with one JSON line.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "ccdispatch/ccdispatch.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::string out = "out";
};

ccd::RunConfig load(const Common& c) {
  ccd::RunConfig rc = c.config.empty() ? ccd::parse_config(json::object()) : ccd::load_config(c.config);
  if (c.seed) rc.sim.scenario.seed = *c.seed;
  return rc;
}

std::string out_path(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  return (fs::path(c.out) / name).string();
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw ccd::IoError("cannot write '" + path + "'");
  f << j.dump(2) << "\n";
  if (!f) throw ccd::IoError("write failed for '" + path + "'");
}

json repairs_json(const ccd::RepairCounts& r) {
  json j = json::object();
  for (std::size_t k = 0; k < ccd::kRepairKindCount; ++k) j[std::string(ccd::kRepairNames[k])] = r.counts[k];
  return j;
}

json costs_json(const ccd::CostBreakdown& c) {
  return {{"penalty_eu", c.penalty_eu},           {"penalty_hu", c.penalty_hu},
          {"penalty_ef", c.penalty_ef},           {"grid_e_purchase", c.grid_e_purchase},
          {"grid_h_purchase", c.grid_h_purchase}, {"export_revenue", c.export_revenue},
          {"lcos_e", c.lcos_e_cost},              {"lcos_h", c.lcos_h_cost},
          {"total", c.total}};
}

int cmd_simulate(const Common& c) {
  const ccd::RunConfig rc = load(c);
  std::vector<ccd::SimResult> runs;
  const ccd::ReplicationSummary s = ccd::run_replications(rc.sim, c.jobs, &runs);

  if (!rc.output.trace_csv.empty()) ccd::write_trace(out_path(c, rc.output.trace_csv), runs.front());

  fmt::print("policy {}  H={}  T={}  replications={}\n", ccd::to_string(rc.sim.policy.kind), rc.sim.horizon,
             rc.sim.steps, rc.sim.replications);
  fmt::print("total cost {:.2f} +- {:.2f} EUR\n", s.mean_cost, s.std_cost);
  for (std::size_t k = 0; k < ccd::kRepairKindCount; ++k)
    fmt::print("  {:<15} {}\n", ccd::kRepairNames[k], s.repair_events.counts[k]);

  const json summary = {{"command", "simulate"},
                        {"policy", std::string(ccd::to_string(rc.sim.policy.kind))},
                        {"seed", rc.sim.scenario.seed},
                        {"replications", rc.sim.replications},
                        {"mean_cost", s.mean_cost},
                        {"std_cost", s.std_cost},
                        {"totals", s.totals},
                        {"mean_cost_by_term", costs_json(s.mean_cost_by_term)},
                        {"repairs", repairs_json(s.repair_events)}};
  if (!rc.output.summary_json.empty()) write_json(out_path(c, rc.output.summary_json), summary);
  std::cout << summary.dump() << std::endl;
  return 0;
}

int cmd_gridsearch(const Common& c, const std::string& which) {
  const ccd::RunConfig rc = load(c);
  const ccd::GridKind kind = which == "theta" ? ccd::GridKind::kTheta
                             : which == "alpha" ? ccd::GridKind::kAlpha
                                                : ccd::GridKind::kStorage;
  const ccd::GridSpec spec = ccd::make_grid(rc, kind);
  const ccd::GridResult r = ccd::run_grid(spec, c.jobs);

  if (!rc.output.heatmap_csv.empty()) ccd::emit_heatmap(r, out_path(c, rc.output.heatmap_csv));
  std::optional<ccd::LeadSchedule> schedule;
  if (kind != ccd::GridKind::kStorage && spec.axis1_name == std::string(kind == ccd::GridKind::kTheta ? "theta1" : "alpha1") &&
      spec.axis2_name == std::string(kind == ccd::GridKind::kTheta ? "theta2" : "alpha2")) {
    schedule = ccd::best_schedule(r, kind, rc.sim.horizon);
    if (!rc.output.schedule_csv.empty()) ccd::write_schedule(*schedule, out_path(c, rc.output.schedule_csv));
  }

  fmt::print("grid {} x {} over ({}, {}), {} replications per cell\n", spec.axis1_values.size(),
             spec.axis2_values.size(), spec.axis1_name, spec.axis2_name, rc.sim.replications);
  fmt::print("baseline (mean policy) {:.2f} EUR\n", r.baseline_cost);
  const auto& best = r.cells[r.best_cell.i][r.best_cell.j];
  fmt::print("best cell {}={} {}={}: {:.2f} EUR, normalized {:.6f}\n", spec.axis1_name, r.best_cell.axis1,
             spec.axis2_name, r.best_cell.axis2, best.mean_cost, r.normalized[r.best_cell.i][r.best_cell.j]);

  json summary = {{"command", "gridsearch"},
                  {"which", which},
                  {"seed", rc.sim.scenario.seed},
                  {"axis1", spec.axis1_name},
                  {"axis2", spec.axis2_name},
                  {"baseline_cost", r.baseline_cost},
                  {"best", {{"axis1", r.best_cell.axis1},
                            {"axis2", r.best_cell.axis2},
                            {"mean_cost", best.mean_cost},
                            {"normalized", r.normalized[r.best_cell.i][r.best_cell.j]}}},
                  {"normalized", r.normalized}};
  if (schedule) summary["schedule"] = schedule->values;
  if (!rc.output.summary_json.empty()) write_json(out_path(c, rc.output.summary_json), summary);
  std::cout << summary.dump() << std::endl;
  return 0;
}

int cmd_export_lp(const Common& c, std::size_t t) {
  const ccd::RunConfig rc = load(c);
  if (t + rc.sim.horizon > rc.sim.steps)
    throw ccd::ConfigError("--t", fmt::format("must be at most steps - horizon = {}", rc.sim.steps - rc.sim.horizon));
  const std::uint64_t seed = ccd::replication_seed(rc.sim.scenario.seed, 0);
  const ccd::lp::Instance inst = ccd::instance_at(rc.sim, seed, t);
  const std::string path = out_path(c, rc.output.mps.empty() ? "instance.mps" : rc.output.mps);
  ccd::lp::export_mps(inst, path);
  const ccd::lp::Solution sol = ccd::lp::solve(inst);

  fmt::print("step {}: {} columns, {} rows written to {}\n", t, inst.num_vars(), inst.num_rows(), path);
  fmt::print("internal solver: {} objective {:.6f}\n", ccd::lp::to_string(sol.status), sol.objective_value);
  const json summary = {{"command", "export-lp"},
                        {"t", t},
                        {"columns", inst.num_vars()},
                        {"rows", inst.num_rows()},
                        {"status", std::string(ccd::lp::to_string(sol.status))},
                        {"objective", sol.objective_value},
                        {"mps", path}};
  std::cout << summary.dump() << std::endl;
  return 0;
}

int cmd_generate(const Common& c, bool print_config) {
  const ccd::RunConfig rc = load(c);
  if (print_config) {
    std::cout << ccd::to_json(rc).dump(2) << "\n";
  }
  const ccd::Trajectory truth = ccd::generate_truth(rc.sim.scenario);
  const std::string path = out_path(c, rc.output.truth_csv.empty() ? "truth.csv" : rc.output.truth_csv);
  ccd::write_csv(path, truth);
  fmt::print("{} steps written to {}\n", truth.size(), path);
  const json summary = {{"command", "generate-scenario"},
                        {"seed", rc.sim.scenario.seed},
                        {"steps", truth.size()},
                        {"path", path}};
  std::cout << summary.dump() << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rolling-horizon dispatch of a wind, storage and district-heating system"};
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "override scenario.seed");
    sub->add_option("--jobs", common.jobs, "worker threads (0 = all cores)");
    sub->add_option("--out", common.out, "output directory");
  };

  auto* simulate = app.add_subcommand("simulate", "run replicated simulations and print a cost summary");
  add_common(simulate);

  std::string which;
  auto* grid = app.add_subcommand("gridsearch", "sweep a policy or storage grid and write a heatmap");
  add_common(grid);
  grid->add_option("--which", which, "theta, alpha or storage")
      ->required()
      ->check(CLI::IsMember({"theta", "alpha", "storage"}));

  std::size_t t = 0;
  auto* export_lp = app.add_subcommand("export-lp", "write the LP solved at one step as MPS");
  add_common(export_lp);
  export_lp->add_option("--t", t, "step index")->required();

  bool print_config = false;
  auto* generate = app.add_subcommand("generate-scenario", "write the synthetic realized series as CSV");
  add_common(generate);
  generate->add_flag("--print-config", print_config, "also print the effective config as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(common);
    if (grid->parsed()) return cmd_gridsearch(common, which);
    if (export_lp->parsed()) return cmd_export_lp(common, t);
    if (generate->parsed()) return cmd_generate(common, print_config);
  } catch (const ccd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    // A step outside the simulated range is a bad argument, not a runtime fault.
    std::cerr << "argument error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
