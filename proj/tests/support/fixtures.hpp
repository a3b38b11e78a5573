#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ccdispatch/forecast.hpp"
#include "ccdispatch/model.hpp"
#include "ccdispatch/rng.hpp"
#include "ccdispatch/sim.hpp"

namespace fixtures {

/// Bundle repeating `e` at every lead with spread `sigma` on the four
/// quantity series.
inline ccd::ForecastBundle constant_bundle(const ccd::ExogenousRealization& e, std::size_t horizon,
                                           double sigma = 0.0) {
  ccd::ForecastBundle b;
  b.horizon = horizon;
  for (const ccd::Series s : ccd::kAllSeries) {
    const double sd = ccd::is_quantity(s) ? sigma : 0.0;
    b.at(s).assign(horizon, {ccd::value_of(e, s), sd});
  }
  return b;
}

/// Bundle with random means in realistic ranges, scaled to `houses`.
inline ccd::ForecastBundle random_bundle(ccd::rng::CounterRng& g, std::size_t horizon, double houses) {
  ccd::ForecastBundle b;
  b.horizon = horizon;
  const double k = houses / 10000.0;
  for (std::size_t l = 0; l < horizon; ++l) {
    b.at(ccd::Series::e_w).push_back({k * g.uniform(0, 25000), k * g.uniform(0, 3000)});
    b.at(ccd::Series::d_eu).push_back({k * g.uniform(0, 7000), k * g.uniform(0, 500)});
    b.at(ccd::Series::d_hu).push_back({k * g.uniform(0, 18000), k * g.uniform(0, 800)});
    b.at(ccd::Series::d_ef).push_back({k * g.uniform(0, 20000), k * g.uniform(0, 1500)});
    b.at(ccd::Series::p_eg).push_back({g.uniform(-0.05, 0.3), 0.0});
    b.at(ccd::Series::p_hg).push_back({g.uniform(0.0, 0.2), 0.0});
  }
  return b;
}

/// Small noise-free simulation config around `houses` households.
inline ccd::SimulationConfig small_config(std::size_t steps, std::size_t horizon, double houses = 100) {
  ccd::SimulationConfig c;
  c.steps = steps;
  c.horizon = horizon;
  c.replications = 1;
  c.params = ccd::SystemParams::for_houses(houses);
  const double k = houses / 10000.0;
  for (const ccd::Series s : ccd::kAllSeries) {
    if (!ccd::is_quantity(s)) continue;
    auto& p = c.scenario.profile(s);
    p.base *= k;
    p.diurnal_amplitude *= k;
    p.seasonal_amplitude *= k;
    p.noise_std *= k;
    p.forecast_std *= k;
  }
  return c;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ccd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
