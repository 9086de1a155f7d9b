#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "losstail/distribution.hpp"
#include "losstail/optimizer.hpp"
#include "losstail/tail_model.hpp"

namespace losstail {

// ---------------------------------------------------------------------------
// Anderson-Darling distance

/// A = -n - (1/n) sum_i [(2i-1) ln F(x_i) + (2(n-i)+1) ln(1 - F(x_i))].
/// Throws LogDomainError naming the first observation with F in {0, 1}.
double ad_statistic(const OrderedSample& sample, const DistributionSpec& spec);

enum class Weighting {
  /// Bernoulli mixed likelihood with (i - 0.5, n - i + 0.5), maximised.
  Unweighted,
  /// Each summand i ln F + (n-i+1) ln(1-F) divided by its value at
  /// F = i/(n+1); minimised, minimum 1 per summand.
  Normalized,
  /// Normalized times sqrt(i), favouring the largest observations; minimised.
  SqrtPreference,
};

std::string_view weighting_name(Weighting w) noexcept;
/// Accepts "unweighted", "normalized", "sqrt".
Weighting parse_weighting(std::string_view tag);
/// True when the objective of this weighting is maximised.
constexpr bool is_maximised(Weighting w) noexcept { return w == Weighting::Unweighted; }

/// Inclusive 1-based rank interval.
struct RankRange {
  std::size_t lo = 1;
  std::size_t hi = 1;

  bool operator==(const RankRange&) const = default;
};

struct MadConfig {
  Weighting weighting = Weighting::Normalized;
  /// Ranks entering the sum; the full sample when empty.
  std::optional<RankRange> rank_range;
  OptimizerOptions optimizer;
};

/// ln F and ln(1 - F) of one observation.
struct LogProb {
  double log_cdf;
  double log_sf;
};

/// Weight w_i of rank i (1-based) in a sample of size n; 1/n for Unweighted.
double mad_weight(std::size_t i, std::size_t n, Weighting w);

/// Weighted summand of rank i for the given log probabilities.
double mad_summand(std::size_t i, std::size_t n, const LogProb& lp, Weighting w);

/// Sum of mad_summand over `range`, where log_probs[k] belongs to rank
/// range.lo + k. Throws LogDomainError on a non-finite logarithm.
double mad_sum(std::size_t n, RankRange range, std::span<const LogProb> log_probs, Weighting w);

/// MAD objective of `spec` on `sample` in its natural orientation
/// (see Weighting).
double mad_objective(const OrderedSample& sample, const DistributionSpec& spec,
                     const MadConfig& config);

// ---------------------------------------------------------------------------
// Fitting

/// A family with some parameters fixed and bounds on the free ones.
struct FamilyTemplate {
  Family family;
  std::vector<std::optional<double>> fixed;
  std::vector<Bounds> bounds;
  std::vector<std::optional<double>> start;

  explicit FamilyTemplate(Family f);

  FamilyTemplate& fix(std::size_t i, double value);
  FamilyTemplate& bound(std::size_t i, double lo, double hi);
  FamilyTemplate& start_at(std::size_t i, double value);

  std::size_t free_count() const noexcept;

  /// GPD for excesses over a fixed location.
  static FamilyTemplate gpd_excess(double location);
  /// Pareto with fixed scale (left endpoint).
  static FamilyTemplate pareto_fixed_scale(double sigma);
};

struct FitResult {
  /// Model component the parameters belong to, e.g. "base".
  std::string component;
  std::optional<Family> family;
  std::vector<std::string> names;
  std::vector<double> theta_hat;
  std::vector<bool> is_free;
  double objective_value = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
  /// Observations entering the objective.
  std::size_t included = 0;
  MadConfig config;

  /// theta_hat of the named parameter; throws DomainError if absent.
  double value(std::string_view name) const;
  DistributionSpec spec() const;
};

/// Minimum-distance fit of a family over config.rank_range using the bounded
/// simplex search. Throws FitFailedError when no restart reaches a finite
/// objective.
FitResult fit_mad(const OrderedSample& sample, const FamilyTemplate& family,
                  const MadConfig& config);

/// Maximum likelihood fit of a GPD to the excesses over `location`
/// (observations <= location are ignored). objective_value is the mean
/// log-likelihood.
FitResult fit_gpd_ml(const OrderedSample& sample, double location,
                     const OptimizerOptions& optimizer = {});

// ---------------------------------------------------------------------------
// Tail index estimators

struct TailIndexEstimate {
  double gamma_hat = 0.0;
  double se = 0.0;
  /// Number of terms averaged.
  std::size_t count = 0;
  /// Reference order statistic (Hill) or lower end of the range (spacings).
  double threshold = 0.0;
};

/// Hill estimator over the k largest values with threshold x_{n-k};
/// se = gamma_hat / sqrt(k).
TailIndexEstimate hill_estimate(const OrderedSample& sample, std::size_t k);

/// Hill estimator with a fixed threshold u: mean of ln(x/u) over the k
/// observations strictly above u; se = gamma_hat / sqrt(k).
TailIndexEstimate hill_above(const OrderedSample& sample, double threshold);

/// Mean of the normalised spacings (n-i+1)(y_i - y_{i-1}) of the log values
/// y_i = ln x_i whose ranks i-1 and i both fall in [lo, hi].
TailIndexEstimate spacings_estimate(const OrderedSample& sample, double lo, double hi);

// ---------------------------------------------------------------------------
// Three-step pipeline

struct PipelinePlan {
  FamilyTemplate base{Family::Gpd};
  std::optional<double> x_lower;
  std::optional<double> x_upper;
  /// ShiftedWeibull (shift pinned at x_upper) or Pareto (scale pinned at x_upper).
  std::optional<Family> upper_family = Family::ShiftedWeibull;
  /// Only Gpd, with its right endpoint pinned at x_lower.
  std::optional<Family> lower_family = Family::Gpd;
  Bounds beta_bounds{0.5, 100.0};
  MadConfig base_config;
  MadConfig upper_config;
  MadConfig lower_config;
  /// p_upper within this distance of 0 or 1 is reported as exactly 0 or 1.
  double boundary_snap = 1e-3;
};

struct PipelineResult {
  AdjustedModel model;
  FitResult base_fit;
  std::optional<FitResult> upper_fit;
  std::optional<FitResult> lower_fit;
  std::vector<std::string> warnings;
};

/// Step 1 fits the base law on the full-sample ranks with values in
/// [x_lower, x_upper]. Step 2 fits the upper adjuster and p_upper on the
/// observations above x_upper, using the composite law conditional on
/// exceeding x_upper and ranks within that subsample. Step 3 fits the lower
/// adjuster on the observations below x_lower with the composite conditional
/// on staying below x_lower. Steps with an empty subsample are skipped with a
/// warning.
PipelineResult fit_pipeline(const OrderedSample& sample, const PipelinePlan& plan);

}  // namespace losstail
