#pragma once

// Forecast-modification policies.
//
// Lead l = t' - t counts from 1 at the step about to be executed.
//   theta_l = theta1 * exp(-theta2 * l)   (theta2 may be negative)
//   alpha_l = alpha1 * exp(-alpha2 * l)   (alpha2 >= 0, so alpha decays)
// A theta policy scales the means of wind and demands and drops their
// spread; an alpha policy replaces each random right-hand side by the bound
// that holds with probability alpha under the forecast marginal.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ccdispatch/error.hpp"
#include "ccdispatch/forecast.hpp"
#include "ccdispatch/normal.hpp"

namespace ccd {

enum class PolicyKind { kMean, kThetaConstant, kThetaLookup, kThetaExp, kCcAlphaExp, kCcAlphaLookup };

[[nodiscard]] constexpr std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kMean: return "mean";
    case PolicyKind::kThetaConstant: return "theta_constant";
    case PolicyKind::kThetaLookup: return "theta_lookup";
    case PolicyKind::kThetaExp: return "theta_exp";
    case PolicyKind::kCcAlphaExp: return "cc_alpha_exp";
    case PolicyKind::kCcAlphaLookup: return "cc_alpha_lookup";
  }
  return "?";
}

[[nodiscard]] inline std::optional<PolicyKind> parse_policy_kind(std::string_view s) {
  for (const auto k : {PolicyKind::kMean, PolicyKind::kThetaConstant, PolicyKind::kThetaLookup,
                       PolicyKind::kThetaExp, PolicyKind::kCcAlphaExp, PolicyKind::kCcAlphaLookup}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

[[nodiscard]] constexpr bool is_theta(PolicyKind k) {
  return k == PolicyKind::kThetaConstant || k == PolicyKind::kThetaLookup || k == PolicyKind::kThetaExp;
}
[[nodiscard]] constexpr bool is_chance_constrained(PolicyKind k) {
  return k == PolicyKind::kCcAlphaExp || k == PolicyKind::kCcAlphaLookup;
}

struct PolicyParams {
  PolicyKind kind = PolicyKind::kMean;
  double theta1 = 1.0;
  double theta2 = 0.0;
  double alpha1 = 0.5;
  double alpha2 = 0.0;
  std::vector<double> lookup;

  /// Throws ConfigError naming the offending field. `horizon` is needed to
  /// check lookup tables.
  void validate(std::size_t horizon) const {
    if (!std::isfinite(theta1)) throw ConfigError("theta1", "must be finite");
    if (!std::isfinite(theta2)) throw ConfigError("theta2", "must be finite");
    if (kind == PolicyKind::kCcAlphaExp) {
      if (!(alpha1 > 0.0 && alpha1 < 1.0)) throw ConfigError("alpha1", "must lie in (0, 1)");
      if (!(alpha2 >= 0.0) || !std::isfinite(alpha2)) throw ConfigError("alpha2", "must be finite and >= 0");
    }
    if (kind == PolicyKind::kThetaLookup || kind == PolicyKind::kCcAlphaLookup) {
      if (lookup.size() != horizon) throw ConfigError("lookup", "length must equal the horizon");
      for (const double v : lookup) {
        if (!std::isfinite(v)) throw ConfigError("lookup", "values must be finite");
        if (kind == PolicyKind::kCcAlphaLookup && !(v > 0.0 && v < 1.0))
          throw ConfigError("lookup", "confidence levels must lie in (0, 1)");
      }
    }
  }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

/// Per-lead values; values[l - 1] belongs to lead l.
struct LeadSchedule {
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] double at_lead(std::size_t lead) const { return values.at(lead - 1); }

  friend bool operator==(const LeadSchedule&, const LeadSchedule&) = default;
};

inline constexpr double kAlphaMin = 1e-6;
inline constexpr double kAlphaMax = 1.0 - 1e-6;

[[nodiscard]] inline double clamp_alpha(double a) { return std::clamp(a, kAlphaMin, kAlphaMax); }

[[nodiscard]] inline LeadSchedule theta_schedule(const PolicyParams& p, std::size_t horizon) {
  LeadSchedule s;
  switch (p.kind) {
    case PolicyKind::kThetaConstant:
      s.values.assign(horizon, p.theta1);
      break;
    case PolicyKind::kThetaExp:
      s.values.reserve(horizon);
      for (std::size_t l = 1; l <= horizon; ++l) {
        s.values.push_back(p.theta1 * std::exp(-p.theta2 * static_cast<double>(l)));
      }
      break;
    case PolicyKind::kThetaLookup:
      if (p.lookup.size() != horizon) throw std::invalid_argument("theta_schedule: lookup length != horizon");
      s.values = p.lookup;
      break;
    default:
      throw std::invalid_argument("theta_schedule: policy kind is not a theta policy");
  }
  return s;
}

[[nodiscard]] inline LeadSchedule alpha_schedule(const PolicyParams& p, std::size_t horizon) {
  LeadSchedule s;
  s.values.reserve(horizon);
  switch (p.kind) {
    case PolicyKind::kCcAlphaExp:
      if (!(p.alpha2 >= 0.0)) throw std::invalid_argument("alpha_schedule: alpha2 must be >= 0");
      for (std::size_t l = 1; l <= horizon; ++l) {
        s.values.push_back(clamp_alpha(p.alpha1 * std::exp(-p.alpha2 * static_cast<double>(l))));
      }
      break;
    case PolicyKind::kCcAlphaLookup:
      if (p.lookup.size() != horizon) throw std::invalid_argument("alpha_schedule: lookup length != horizon");
      for (const double v : p.lookup) s.values.push_back(clamp_alpha(v));
      break;
    default:
      throw std::invalid_argument("alpha_schedule: policy kind is not a chance-constrained policy");
  }
  return s;
}

/// Series whose means a theta policy scales: the ones that bound flows.
/// Prices only enter the objective and keep their mean.
inline constexpr std::array<Series, 4> kConstrainedSeries = {Series::e_w, Series::d_eu, Series::d_hu,
                                                             Series::d_ef};

/// Scales the means of `which` by the schedule and zeroes their spread.
[[nodiscard]] inline ForecastBundle apply_dla_theta(const ForecastBundle& bundle, const LeadSchedule& sched,
                                                    std::span<const Series> which = kConstrainedSeries) {
  if (sched.size() != bundle.horizon) throw std::invalid_argument("apply_dla_theta: schedule length != horizon");
  ForecastBundle out = bundle;
  for (const Series s : which) {
    auto& v = out.at(s);
    for (std::size_t l = 0; l < v.size(); ++l) {
      v[l].mu = sched.values[l] * v[l].mu;
      v[l].sigma = 0.0;
    }
  }
  return out;
}

/// Which side of a random right-hand side the constraint bounds. Both wind
/// availability and the demand caps are random upper bounds on flows.
enum class BoundSense { kSupplyUpper, kDemandUpper };

/// Deterministic replacement for a random upper bound xi ~ N(mu, sigma) in
/// `a'x <= xi` so that the constraint holds with probability alpha:
/// mu - sigma * Phi^-1(alpha). alpha > 0.5 lies below the mean.
[[nodiscard]] inline double tighten_bound(const GaussianMarginal& g, double alpha,
                                          BoundSense /*sense*/ = BoundSense::kSupplyUpper) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("tighten_bound: alpha must lie in (0, 1)");
  if (g.sigma == 0.0 || alpha == 0.5) return g.mu;
  return g.mu - g.sigma * normal_quantile(alpha);
}

/// A forecast bundle after a policy transform, ready for LP assembly.
struct PolicyView {
  ForecastBundle bundle;
  std::optional<LeadSchedule> alpha;
};

/// Applies `p` to a raw forecast bundle.
[[nodiscard]] inline PolicyView apply_policy(const ForecastBundle& bundle, const PolicyParams& p) {
  if (p.kind == PolicyKind::kMean) return {bundle, std::nullopt};
  if (is_theta(p.kind)) return {apply_dla_theta(bundle, theta_schedule(p, bundle.horizon)), std::nullopt};
  return {bundle, alpha_schedule(p, bundle.horizon)};
}

}  // namespace ccd
