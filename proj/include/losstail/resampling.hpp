#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "losstail/distribution.hpp"
#include "losstail/optimizer.hpp"

namespace losstail {

/// Any estimator: sample in, parameter vector out. Must be safe to call
/// concurrently; throwing marks the replicate as failed.
using FitClosure = std::function<std::vector<double>(const OrderedSample&)>;

struct BootstrapOptions {
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  /// Two-sided percentile interval level.
  double level = 0.90;
  /// p_upper within this distance of 0 or 1 counts as degenerate.
  double degeneracy_tol = 1e-3;
  /// Position of p_upper in the closure output, if any.
  std::optional<std::size_t> p_upper_index;
  /// Optional clamp applied to each parameter before summarising.
  std::vector<std::optional<Bounds>> clamp;
  /// Parameter names for reports; "theta<i>" when missing.
  std::vector<std::string> names;
};

struct ParameterSummary {
  std::string name;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// Same statistics over replicates whose p_upper is not degenerate.
  double se_filtered = 0.0;
  double lower_filtered = 0.0;
  double upper_filtered = 0.0;
  std::size_t count_filtered = 0;
};

struct BootstrapSummary {
  std::size_t replicates = 0;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  double level = 0.90;
  double degeneracy_tol = 1e-3;
  /// Shares of successful replicates with p_upper at/near 0 and 1.
  double fraction_p_at_zero = 0.0;
  double fraction_p_at_one = 0.0;
  std::uint64_t seed = 0;
  std::vector<ParameterSummary> parameters;
  /// Per-replicate estimates in replicate order; empty for failures.
  std::vector<std::vector<double>> estimates;
};

/// Resample of size n drawn with replacement using substream `seed`.
OrderedSample bootstrap_resample(const OrderedSample& sample, std::uint64_t seed);

/// Nonparametric bootstrap: replicate b refits bootstrap_resample(sample,
/// substream(seed, b)). Standard errors are sample standard deviations and
/// intervals are percentile intervals over the successful replicates, merged
/// in replicate order. OpenMP-parallel over replicates. Throws
/// FitFailedError when every replicate fails.
BootstrapSummary bootstrap_fit(const OrderedSample& sample, const FitClosure& fit,
                               const BootstrapOptions& options);

/// Summary statistics of per-replicate estimates (empty vector = failed).
BootstrapSummary summarize_bootstrap(std::vector<std::vector<double>> estimates,
                                     const BootstrapOptions& options);

namespace serial {

/// Single-threaded reference of losstail::bootstrap_fit.
BootstrapSummary bootstrap_fit(const OrderedSample& sample, const FitClosure& fit,
                               const BootstrapOptions& options);

}  // namespace serial

}  // namespace losstail
