#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "losstail/distribution.hpp"
#include "losstail/tail_model.hpp"

namespace losstail {

/// n draws of min(Y, W) with Y, W independent; survival S_Y * S_W.
OrderedSample sample_min_principle(const DistributionSpec& y, const DistributionSpec& w,
                                   std::size_t n, std::uint64_t seed);

/// n draws of max(Y, W) with Y, W independent; cdf F_Y * F_W.
OrderedSample sample_max_principle(const DistributionSpec& y, const DistributionSpec& w,
                                   std::size_t n, std::uint64_t seed);

/// Generative mechanism of an AdjustedModel: draw Y from the base; with
/// probability p_upper replace it by min(Y, W_upper); then, with a lower
/// adjustment, take max(., W_lower).
OrderedSample sample_mechanism(const AdjustedModel& model, std::size_t n, std::uint64_t seed);

/// Size-dependent thinning of (logarithmic) losses.
///
/// A loss y is dropped with probability G(y) = exp(-y / thinning_scale) and
/// kept with probability 1 - G(y), so small losses are rarely filed as claims.
/// `no_thinning` keeps every loss.
struct ThinningSpec {
  DistributionSpec base;
  double thinning_scale = 1.0;
  bool no_thinning = false;
};

/// Probability G(y) that a loss of size y is dropped.
double thinning_probability(const ThinningSpec& spec, double y);

/// Cdf of the filed claims, int_0^x f(1-G) / int_0^inf f(1-G), by adaptive
/// Gauss-Kronrod quadrature (absolute error below 1e-10). Throws
/// NumericFailure if the weighted density does not decay or integrates to 0.
double thinned_cdf(const ThinningSpec& spec, double x);

/// Closed form of thinned_cdf for an exponential base with scale sigma:
/// 1 - [(sigma + sigma_t) e^{-x/sigma} - sigma_t e^{-x (sigma + sigma_t)/(sigma sigma_t)}] / sigma.
double thinned_cdf_closed(double sigma, double sigma_t, double x);

/// n filed claims drawn by rejection from the base law.
OrderedSample sample_thinned(const ThinningSpec& spec, std::size_t n, std::uint64_t seed);

/// Pareto point process above a stationary threshold with annual inflation.
///
/// Year k (1-based) has a Poisson number of claims with mean
/// base_rate * inflation_factor^(k-1); sizes are i.i.d. Pareto(alpha, threshold).
struct InflationScenario {
  double alpha = 1.0;
  double inflation_factor = 1.05;
  int years = 10;
  double threshold = 0.01;
  double base_rate = 100.0;
};

struct ScenarioYear {
  int year = 0;
  /// Sorted claim sizes as observed in that year.
  std::vector<double> raw;
  /// raw scaled to the price level of the final year, inflation_factor^(years - year).
  std::vector<double> inflated;
};

struct ScenarioResult {
  std::vector<ScenarioYear> years;

  OrderedSample pooled_raw() const;
  OrderedSample pooled_inflated() const;
};

/// Year k draws from substream(seed, k).
ScenarioResult simulate_inflation_scenario(const InflationScenario& scenario, std::uint64_t seed);

}  // namespace losstail
