#pragma once

// JSON run configuration.
//
//   {
//     "system":     { SystemParams fields },
//     "scenario":   { "seed", "year_length", "forecast_growth", "ar1_rho",
//                     "allow_negative_prices", "truth_csv",
//                     "series": { "e_w": { SeriesProfile fields }, ... } },
//     "simulation": { "horizon", "steps", "replications", "surplus_export_enabled" },
//     "policy":     { "kind", "theta1", "theta2", "alpha1", "alpha2", "lookup" },
//     "grid":       { "axis1_name", "axis2_name", "axis1_values", "axis2_values" },
//     "output":     { "trace_csv", "heatmap_csv", "schedule_csv", "mps", "truth_csv", "summary_json" }
//   }
//
// Every section and key is optional; unknown keys are errors. When `system`
// gives `n_houses`, the capacity and rate defaults follow from it and any
// explicit field overrides them.

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccdispatch/error.hpp"
#include "ccdispatch/forecast.hpp"
#include "ccdispatch/policy.hpp"
#include "ccdispatch/search.hpp"
#include "ccdispatch/sim.hpp"

namespace ccd {

struct GridOverrides {
  std::optional<std::string> axis1_name;
  std::optional<std::string> axis2_name;
  std::optional<std::vector<double>> axis1_values;
  std::optional<std::vector<double>> axis2_values;

  friend bool operator==(const GridOverrides&, const GridOverrides&) = default;
};

/// Output file names, relative to the output directory. Empty disables.
struct OutputConfig {
  std::string trace_csv = "trace.csv";
  std::string heatmap_csv = "heatmap.csv";
  std::string schedule_csv = "schedule.csv";
  std::string mps = "instance.mps";
  std::string truth_csv = "truth.csv";
  std::string summary_json = "summary.json";

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunConfig {
  SimulationConfig sim;
  /// Realized series file; empty means synthetic.
  std::string truth_csv;
  GridOverrides grid;
  OutputConfig output;
};

namespace detail {

using nlohmann::json;

class Section {
public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError(name_, "must be an object");
  }

  /// Rejects any key not in `allowed`.
  void only(std::initializer_list<const char*> allowed) const {
    for (const auto& [k, v] : j_.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw ConfigError(key(k), "unknown key");
    }
  }

  [[nodiscard]] bool has(const char* k) const { return j_.contains(k); }
  [[nodiscard]] const json& raw(const char* k) const { return j_.at(k); }
  [[nodiscard]] std::string key(const std::string& k) const { return name_.empty() ? k : name_ + "." + k; }

  void read(const char* k, double& out) const {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_number()) throw ConfigError(key(k), "must be a number");
    out = v.get<double>();
  }
  void read(const char* k, bool& out) const {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_boolean()) throw ConfigError(key(k), "must be true or false");
    out = v.get<bool>();
  }
  void read(const char* k, std::string& out) const {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_string()) throw ConfigError(key(k), "must be a string");
    out = v.get<std::string>();
  }
  template <class Int>
    requires std::is_unsigned_v<Int>
  void read(const char* k, Int& out) const {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_number_unsigned()) throw ConfigError(key(k), "must be a non-negative integer");
    out = v.get<Int>();
  }
  void read(const char* k, std::vector<double>& out) const {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_array()) throw ConfigError(key(k), "must be an array of numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(key(k), "must be an array of numbers");
      out.push_back(e.get<double>());
    }
  }
  template <class T>
  void read(const char* k, std::optional<T>& out) const {
    if (!has(k)) return;
    T v{};
    read(k, v);
    out = std::move(v);
  }

private:
  const json& j_;
  std::string name_;
};

inline void read_system(const Section& s, SystemParams& p) {
  s.only({"n_houses", "r_e_max", "r_e_min", "r_e_0", "r_h_max", "r_h_min", "r_h_0", "beta_e_c", "beta_e_d",
          "beta_h_c", "beta_h_d", "gamma_e_c", "gamma_e_d", "gamma_h_c", "gamma_h_d", "lcos_e", "lcos_h",
          "delta_eh", "c_p_eu", "c_p_hu", "c_p_ef"});
  if (s.has("n_houses")) {
    double houses = p.n_houses;
    s.read("n_houses", houses);
    if (!std::isfinite(houses) || houses < 0.0) throw ConfigError("system.n_houses", "must be finite and >= 0");
    p = SystemParams::for_houses(houses);
  }
  s.read("r_e_max", p.r_e_max);
  s.read("r_e_min", p.r_e_min);
  s.read("r_e_0", p.r_e_0);
  s.read("r_h_max", p.r_h_max);
  s.read("r_h_min", p.r_h_min);
  s.read("r_h_0", p.r_h_0);
  s.read("beta_e_c", p.beta_e_c);
  s.read("beta_e_d", p.beta_e_d);
  s.read("beta_h_c", p.beta_h_c);
  s.read("beta_h_d", p.beta_h_d);
  s.read("gamma_e_c", p.gamma_e_c);
  s.read("gamma_e_d", p.gamma_e_d);
  s.read("gamma_h_c", p.gamma_h_c);
  s.read("gamma_h_d", p.gamma_h_d);
  s.read("lcos_e", p.lcos_e);
  s.read("lcos_h", p.lcos_h);
  s.read("delta_eh", p.delta_eh);
  s.read("c_p_eu", p.c_p_eu);
  s.read("c_p_hu", p.c_p_hu);
  s.read("c_p_ef", p.c_p_ef);
}

inline void read_scenario(const Section& s, ScenarioConfig& sc, std::string& truth_csv) {
  s.only({"seed", "year_length", "forecast_growth", "ar1_rho", "allow_negative_prices", "truth_csv", "series"});
  s.read("seed", sc.seed);
  s.read("year_length", sc.year_length);
  s.read("forecast_growth", sc.forecast_growth);
  s.read("ar1_rho", sc.ar1_rho);
  s.read("allow_negative_prices", sc.allow_negative_prices);
  s.read("truth_csv", truth_csv);
  if (!s.has("series")) return;
  const Section series(s.raw("series"), s.key("series"));
  series.only({"e_w", "d_eu", "d_hu", "d_ef", "p_eg", "p_hg"});
  for (const Series k : kAllSeries) {
    const std::string name(kSeriesNames[index(k)]);
    if (!series.has(name.c_str())) continue;
    const Section prof(series.raw(name.c_str()), series.key(name));
    prof.only({"base", "diurnal_amplitude", "seasonal_amplitude", "noise_std", "forecast_std"});
    SeriesProfile& p = sc.profile(k);
    prof.read("base", p.base);
    prof.read("diurnal_amplitude", p.diurnal_amplitude);
    prof.read("seasonal_amplitude", p.seasonal_amplitude);
    prof.read("noise_std", p.noise_std);
    prof.read("forecast_std", p.forecast_std);
  }
}

inline void read_policy(const Section& s, PolicyParams& p) {
  s.only({"kind", "theta1", "theta2", "alpha1", "alpha2", "lookup"});
  if (s.has("kind")) {
    std::string kind;
    s.read("kind", kind);
    const auto k = parse_policy_kind(kind);
    if (!k) throw ConfigError("policy.kind", "unknown policy '" + kind + "'");
    p.kind = *k;
  }
  s.read("theta1", p.theta1);
  s.read("theta2", p.theta2);
  s.read("alpha1", p.alpha1);
  s.read("alpha2", p.alpha2);
  s.read("lookup", p.lookup);
}

}  // namespace detail

/// Parses and validates a config document. Throws ConfigError naming the
/// offending key as `section.key`.
[[nodiscard]] inline RunConfig parse_config(const nlohmann::json& doc) {
  using detail::Section;
  RunConfig rc;
  const Section root(doc, "");
  root.only({"system", "scenario", "simulation", "policy", "grid", "output"});

  if (root.has("system")) detail::read_system(Section(doc.at("system"), "system"), rc.sim.params);
  if (root.has("scenario")) detail::read_scenario(Section(doc.at("scenario"), "scenario"), rc.sim.scenario, rc.truth_csv);
  if (root.has("simulation")) {
    const Section s(doc.at("simulation"), "simulation");
    s.only({"horizon", "steps", "replications", "surplus_export_enabled"});
    s.read("horizon", rc.sim.horizon);
    s.read("steps", rc.sim.steps);
    s.read("replications", rc.sim.replications);
    s.read("surplus_export_enabled", rc.sim.surplus_export_enabled);
  }
  if (root.has("policy")) detail::read_policy(Section(doc.at("policy"), "policy"), rc.sim.policy);
  if (root.has("grid")) {
    const Section s(doc.at("grid"), "grid");
    s.only({"axis1_name", "axis2_name", "axis1_values", "axis2_values"});
    s.read("axis1_name", rc.grid.axis1_name);
    s.read("axis2_name", rc.grid.axis2_name);
    s.read("axis1_values", rc.grid.axis1_values);
    s.read("axis2_values", rc.grid.axis2_values);
  }
  if (root.has("output")) {
    const Section s(doc.at("output"), "output");
    s.only({"trace_csv", "heatmap_csv", "schedule_csv", "mps", "truth_csv", "summary_json"});
    s.read("trace_csv", rc.output.trace_csv);
    s.read("heatmap_csv", rc.output.heatmap_csv);
    s.read("schedule_csv", rc.output.schedule_csv);
    s.read("mps", rc.output.mps);
    s.read("truth_csv", rc.output.truth_csv);
    s.read("summary_json", rc.output.summary_json);
  }

  if (!rc.truth_csv.empty()) {
    try {
      rc.sim.truth = std::make_shared<const Trajectory>(load_csv(rc.truth_csv));
    } catch (const Error& e) {
      throw ConfigError("scenario.truth_csv", e.what());
    }
  }
  rc.sim.validate();
  return rc;
}

[[nodiscard]] inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

[[nodiscard]] inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Effective config with every default spelled out.
[[nodiscard]] inline nlohmann::json to_json(const RunConfig& rc) {
  using nlohmann::json;
  const SystemParams& p = rc.sim.params;
  json system = {
      {"n_houses", p.n_houses},   {"r_e_max", p.r_e_max},     {"r_e_min", p.r_e_min},     {"r_e_0", p.r_e_0},
      {"r_h_max", p.r_h_max},     {"r_h_min", p.r_h_min},     {"r_h_0", p.r_h_0},         {"beta_e_c", p.beta_e_c},
      {"beta_e_d", p.beta_e_d},   {"beta_h_c", p.beta_h_c},   {"beta_h_d", p.beta_h_d},   {"gamma_e_c", p.gamma_e_c},
      {"gamma_e_d", p.gamma_e_d}, {"gamma_h_c", p.gamma_h_c}, {"gamma_h_d", p.gamma_h_d}, {"lcos_e", p.lcos_e},
      {"lcos_h", p.lcos_h},       {"delta_eh", p.delta_eh},   {"c_p_eu", p.c_p_eu},       {"c_p_hu", p.c_p_hu},
      {"c_p_ef", p.c_p_ef}};

  const ScenarioConfig& sc = rc.sim.scenario;
  json series = json::object();
  for (const Series k : kAllSeries) {
    const SeriesProfile& pr = sc.profile(k);
    series[std::string(kSeriesNames[index(k)])] = {{"base", pr.base},
                                                   {"diurnal_amplitude", pr.diurnal_amplitude},
                                                   {"seasonal_amplitude", pr.seasonal_amplitude},
                                                   {"noise_std", pr.noise_std},
                                                   {"forecast_std", pr.forecast_std}};
  }
  json scenario = {{"seed", sc.seed},
                   {"year_length", sc.year_length},
                   {"forecast_growth", sc.forecast_growth},
                   {"ar1_rho", sc.ar1_rho},
                   {"allow_negative_prices", sc.allow_negative_prices},
                   {"series", series}};
  if (!rc.truth_csv.empty()) scenario["truth_csv"] = rc.truth_csv;

  const PolicyParams& pol = rc.sim.policy;
  json policy = {{"kind", std::string(to_string(pol.kind))},
                 {"theta1", pol.theta1},
                 {"theta2", pol.theta2},
                 {"alpha1", pol.alpha1},
                 {"alpha2", pol.alpha2}};
  if (!pol.lookup.empty()) policy["lookup"] = pol.lookup;

  json grid = json::object();
  if (rc.grid.axis1_name) grid["axis1_name"] = *rc.grid.axis1_name;
  if (rc.grid.axis2_name) grid["axis2_name"] = *rc.grid.axis2_name;
  if (rc.grid.axis1_values) grid["axis1_values"] = *rc.grid.axis1_values;
  if (rc.grid.axis2_values) grid["axis2_values"] = *rc.grid.axis2_values;

  const OutputConfig& o = rc.output;
  return {{"system", system},
          {"scenario", scenario},
          {"simulation",
           {{"horizon", rc.sim.horizon},
            {"steps", rc.sim.steps},
            {"replications", rc.sim.replications},
            {"surplus_export_enabled", rc.sim.surplus_export_enabled}}},
          {"policy", policy},
          {"grid", grid},
          {"output",
           {{"trace_csv", o.trace_csv},
            {"heatmap_csv", o.heatmap_csv},
            {"schedule_csv", o.schedule_csv},
            {"mps", o.mps},
            {"truth_csv", o.truth_csv},
            {"summary_json", o.summary_json}}}};
}

/// Grid spec for `kind`: the default axes with config overrides applied.
[[nodiscard]] inline GridSpec make_grid(const RunConfig& rc, GridKind kind) {
  GridSpec g = default_grid(kind, rc.sim);
  if (rc.grid.axis1_name) g.axis1_name = *rc.grid.axis1_name;
  if (rc.grid.axis2_name) g.axis2_name = *rc.grid.axis2_name;
  if (rc.grid.axis1_values) g.axis1_values = *rc.grid.axis1_values;
  if (rc.grid.axis2_values) g.axis2_values = *rc.grid.axis2_values;
  g.validate();
  return g;
}

}  // namespace ccd
