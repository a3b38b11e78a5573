#include <gtest/gtest.h>

#include <fstream>

#include "ccdispatch/config.hpp"
#include "support/fixtures.hpp"

namespace ccd {
namespace {

std::string key_of(const std::string& text) {
  try {
    (void)parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

TEST(Config, EmptyDocumentGivesDefaults) {
  const RunConfig rc = parse_config_text("{}");
  EXPECT_EQ(rc.sim.horizon, 24u);
  EXPECT_EQ(rc.sim.steps, 8760u);
  EXPECT_EQ(rc.sim.params, SystemParams{});
  EXPECT_EQ(rc.sim.policy, PolicyParams{});
  EXPECT_EQ(rc.output.heatmap_csv, "heatmap.csv");
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(key_of(R"({"system": {"beta_e_c": -0.5}})"), "system.beta_e_c");
  EXPECT_EQ(key_of(R"({"system": {"bogus": 1}})"), "system.bogus");
  EXPECT_EQ(key_of(R"({"simulation": {"horizon": 0}})"), "simulation.horizon");
  EXPECT_EQ(key_of(R"({"simulation": {"steps": -3}})"), "simulation.steps");
  EXPECT_EQ(key_of(R"({"policy": {"kind": "magic"}})"), "policy.kind");
  EXPECT_EQ(key_of(R"({"policy": {"kind": "cc_alpha_exp", "alpha1": 1.2}})"), "policy.alpha1");
  EXPECT_EQ(key_of(R"({"scenario": {"series": {"e_w": {"noise_std": -1}}}})"), "scenario.series.e_w.noise_std");
  EXPECT_EQ(key_of(R"({"scenario": {"truth_csv": "/nonexistent/t.csv"}})"), "scenario.truth_csv");
  EXPECT_EQ(key_of(R"({"grid": {"axis1_values": "x"}})"), "grid.axis1_values");
  EXPECT_EQ(key_of(R"({"extra": {}})"), "extra");
  EXPECT_EQ(key_of("{not json"), "<document>");
}

TEST(Config, HousesScaleDefaults) {
  const RunConfig rc = parse_config_text(R"({"system": {"n_houses": 100, "r_e_max": 500}})");
  EXPECT_DOUBLE_EQ(rc.sim.params.r_h_max, 1000.0);
  EXPECT_DOUBLE_EQ(rc.sim.params.gamma_h_c, 100.0);
  EXPECT_DOUBLE_EQ(rc.sim.params.r_e_max, 500.0);
}

TEST(Config, RoundTripThroughJson) {
  const RunConfig rc = parse_config_text(R"({
    "system": {"n_houses": 250, "lcos_e": 0.07},
    "scenario": {"seed": 9, "forecast_growth": 0.2, "series": {"d_hu": {"base": 123.5}}},
    "simulation": {"horizon": 12, "steps": 200, "replications": 3, "surplus_export_enabled": true},
    "policy": {"kind": "theta_exp", "theta1": 0.9, "theta2": 0.05},
    "grid": {"axis1_values": [0.6, 0.8]},
    "output": {"trace_csv": "t.csv"}
  })");
  const RunConfig back = parse_config(to_json(rc));
  EXPECT_EQ(back.sim.params, rc.sim.params);
  EXPECT_EQ(back.sim.scenario, rc.sim.scenario);
  EXPECT_EQ(back.sim.policy, rc.sim.policy);
  EXPECT_EQ(back.sim.horizon, 12u);
  EXPECT_TRUE(back.sim.surplus_export_enabled);
  EXPECT_EQ(back.grid.axis1_values, rc.grid.axis1_values);
  EXPECT_EQ(back.output.trace_csv, "t.csv");
  EXPECT_EQ(to_json(back), to_json(rc));
}

TEST(Config, TruthCsvLoaded) {
  const auto dir = fixtures::temp_dir("config_truth");
  const std::string path = (dir / "truth.csv").string();
  ScenarioConfig sc;
  sc.year_length = 48;
  write_csv(path, generate_truth(sc));
  const RunConfig rc =
      parse_config_text(R"({"scenario": {"truth_csv": ")" + path + R"("}, "simulation": {"steps": 48}})");
  ASSERT_TRUE(rc.sim.truth);
  EXPECT_EQ(rc.sim.truth->size(), 48u);
  EXPECT_EQ(key_of(R"({"scenario": {"truth_csv": ")" + path + R"("}, "simulation": {"steps": 49}})"),
            "scenario.truth_csv");
}

TEST(Config, MakeGridAppliesOverrides) {
  const RunConfig rc = parse_config_text(R"({"grid": {"axis2_values": [0.0]}})");
  const GridSpec g = make_grid(rc, GridKind::kAlpha);
  EXPECT_EQ(g.axis1_name, "alpha1");
  EXPECT_EQ(g.axis2_values, std::vector<double>{0.0});
  const RunConfig bad = parse_config_text(R"({"grid": {"axis1_name": "nope"}})");
  EXPECT_THROW((void)make_grid(bad, GridKind::kTheta), ConfigError);
}

TEST(Config, LoadMissingFile) { EXPECT_THROW((void)load_config("/nonexistent/cfg.json"), ConfigError); }

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"default.json", "desk.json", "desk_noiseless.json"}) {
    const std::string path = std::string(CCD_SOURCE_DIR) + "/configs/" + name;
    EXPECT_NO_THROW((void)load_config(path)) << name;
  }
}

}  // namespace
}  // namespace ccd
