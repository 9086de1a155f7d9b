#pragma once

#include <optional>
#include <string>

#include "losstail/distribution.hpp"

namespace losstail {

/// Survival-product adjustment of the upper tail, applied with probability
/// p_upper above x_upper.
struct UpperAdjustment {
  DistributionSpec adjuster;
  double p_upper;
  double x_upper;

  bool operator==(const UpperAdjustment&) const = default;
};

/// Cdf-product adjustment of the lower tail below x_lower.
struct LowerAdjustment {
  DistributionSpec adjuster;
  double x_lower;

  bool operator==(const LowerAdjustment&) const = default;
};

/// Base claim-size law with optional tail adjustments.
///
/// The composite is piecewise:
///   x >= x_upper : S(x) = S_base(x) * (p_upper * S_adj,u(x) + 1 - p_upper)
///   x <= x_lower : F(x) = F_base(x) * F_adj,l(x)
///   otherwise    : the base law
/// The constructor rejects p_upper outside [0,1], x_lower >= x_upper, and
/// finite right endpoints of the base or upper adjuster when an upper
/// adjustment is present.
class AdjustedModel {
 public:
  explicit AdjustedModel(DistributionSpec base, std::optional<UpperAdjustment> upper = {},
                         std::optional<LowerAdjustment> lower = {});

  const DistributionSpec& base() const noexcept { return base_; }
  const std::optional<UpperAdjustment>& upper() const noexcept { return upper_; }
  const std::optional<LowerAdjustment>& lower() const noexcept { return lower_; }

  bool operator==(const AdjustedModel&) const = default;

 private:
  DistributionSpec base_;
  std::optional<UpperAdjustment> upper_;
  std::optional<LowerAdjustment> lower_;
};

/// Lower GPD adjuster whose right endpoint is pinned at x_lower:
/// GPD(gamma, -gamma * x_lower, 0) for gamma < 0.
DistributionSpec pinned_lower_gpd(double gamma, double x_lower);

double adjusted_survival(const AdjustedModel& model, double x);
double adjusted_cdf(const AdjustedModel& model, double x);
double adjusted_log_survival(const AdjustedModel& model, double x);
double adjusted_log_cdf(const AdjustedModel& model, double x);

/// Inverse of the composite cdf by bisection; p must lie in (0, 1).
double adjusted_quantile(const AdjustedModel& model, double p);

/// 1 - S_upper(x)/S_base(x) at a probe far above x_upper; tends to p_upper.
/// Throws ModelInvalidError without an upper adjustment and NumericFailure
/// when the base survival underflows at the probe.
double transition_probability_limit(const AdjustedModel& model, double x_probe);

/// Extreme value index of the adjusted upper tail.
///
/// p_upper < 1 keeps gamma_base. With p_upper == 1 the survival product of two
/// Pareto-type tails adds the exponents, 1/(1/gamma_base + 1/gamma_adj), and a
/// Gumbel-domain adjuster (gamma_adj == 0) gives 0.
double composed_ev_index(double gamma_base, double gamma_adj, double p_upper);

struct ConditionReport {
  /// sup |1 - S_adj,u(x)| over the grid on (0, x_upper]; 0 without upper.
  double upper_deviation = 0.0;
  /// sup |1 - F_adj,l(x)| over the grid on [x_lower, inf); 0 without lower.
  double lower_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

/// Checks that the adjusters leave the base law untouched between the
/// thresholds, on a 2001-point log-spaced grid per side spanning six decades.
ConditionReport validate_conditions(const AdjustedModel& model, double tol);

}  // namespace losstail
