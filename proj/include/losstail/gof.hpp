#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "losstail/distribution.hpp"
#include "losstail/tail_model.hpp"

namespace losstail {

struct RunLengths {
  /// l_i = l_{i-1} + 1 if edf_i > model_i, else 0 (l_0 = 0).
  std::vector<std::size_t> l;
  /// max_i l_i (0 for empty input).
  std::size_t m = 0;
};

/// Throws DomainError on a length mismatch.
RunLengths run_lengths(std::span<const double> edf_vals, std::span<const double> model_vals);

/// Longest run of the k sorted tail values whose conditional plotting position
/// i/(k+1) exceeds the Pareto(alpha, sigma) cdf.
std::size_t tail_run_statistic(std::span<const double> tail_sorted, double sigma, double alpha);

/// Null distribution of the run statistic: replicate r draws k values from
/// Pareto(alpha, sigma) with substream(seed, r), re-estimates alpha by Hill
/// with threshold sigma, and records the statistic. OpenMP-parallel over
/// replicates; the output does not depend on the thread count.
std::vector<std::size_t> simulate_null_run_statistics(std::size_t k, double sigma, double alpha,
                                                      std::size_t reps, std::uint64_t seed);

/// Monte-Carlo probability of a run statistic >= m under a Pareto tail of size k.
double run_statistic_tail_probability(std::size_t k, std::size_t m, std::size_t reps,
                                      std::uint64_t seed);

struct TailTestResult {
  std::size_t k = 0;
  std::size_t m = 0;
  double alpha_hat = 0.0;
  /// Threshold x_{n-k} (1-based), the largest value not in the tail set.
  double sigma = 0.0;
  double p_value = 1.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  /// p_value < 0.05.
  bool reject_5pct = false;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kDefaultTestReps = 10'000;

/// Longest-run test of H0 "the k largest observations follow a Pareto law".
///
/// The threshold is the order statistic just below the k largest values; the
/// exponent is the Hill estimate over those k values, and each Monte-Carlo
/// replicate re-estimates it the same way. Ties at the threshold produce a
/// warning.
TailTestResult pareto_tail_test(const OrderedSample& sample, std::size_t k,
                                std::size_t reps = kDefaultTestReps, std::uint64_t seed = 1);

namespace serial {

/// Single-threaded reference of losstail::simulate_null_run_statistics.
std::vector<std::size_t> simulate_null_run_statistics(std::size_t k, double sigma, double alpha,
                                                      std::size_t reps, std::uint64_t seed);

}  // namespace serial

// ---------------------------------------------------------------------------
// Q-Q coordinates and tables

enum class Margins { Original, StandardNormal, StandardFrechet };

std::string_view margins_name(Margins m) noexcept;
/// Accepts "original", "normal", "frechet".
Margins parse_margins(std::string_view tag);

using AnyModel = std::variant<DistributionSpec, AdjustedModel, EmpiricalCdf>;

double model_cdf(const AnyModel& model, double x);
double model_survival(const AnyModel& model, double x);
double model_quantile(const AnyModel& model, double p);

struct QqPoint {
  double theoretical;
  double empirical;
};

struct QqResult {
  std::vector<QqPoint> points;
  /// Points where the transform was undefined (cdf 0 or 1).
  std::size_t dropped = 0;
};

/// For rank i: theoretical = T(model quantile at i/(n+1)), empirical = T(x_i),
/// T the identity, the standard normal quantile of the model cdf, or the unit
/// Frechet transform -1/ln F.
QqResult qq_coordinates(const OrderedSample& sample, const AnyModel& model, Margins margins);

struct TablePoint {
  double x;
  double prob;
};

/// (x_i, i/(n+1)).
std::vector<TablePoint> edf_table(const OrderedSample& sample);
/// `points` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t points);

}  // namespace losstail
