#include "losstail/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "losstail/error.hpp"
#include "losstail/random.hpp"

namespace losstail {

namespace {

void validate(const BootstrapOptions& o) {
  if (o.replicates < 1) throw DomainError("bootstrap: replicates must be >= 1");
  if (!(o.level > 0.0 && o.level < 1.0)) throw DomainError("bootstrap: level must lie in (0,1)");
}

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double stdev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> run_replicate(const OrderedSample& sample, const FitClosure& fit,
                                  std::uint64_t seed) {
  try {
    auto est = fit(bootstrap_resample(sample, seed));
    for (double x : est) {
      if (!std::isfinite(x)) return {};
    }
    return est;
  } catch (const std::exception&) {
    return {};
  }
}

}  // namespace

OrderedSample bootstrap_resample(const OrderedSample& sample, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = sample.size();
  std::vector<double> v(n);
  for (double& x : v) x = sample[rng.below(n)];
  return OrderedSample(std::move(v), sample.label());
}

BootstrapSummary summarize_bootstrap(std::vector<std::vector<double>> estimates,
                                     const BootstrapOptions& options) {
  validate(options);
  BootstrapSummary s;
  s.replicates = estimates.size();
  s.level = options.level;
  s.degeneracy_tol = options.degeneracy_tol;
  s.seed = options.seed;

  std::size_t dim = 0;
  for (const auto& e : estimates) {
    if (e.empty()) {
      ++s.failed;
      continue;
    }
    if (dim == 0) dim = e.size();
    if (e.size() != dim) throw DomainError("bootstrap: replicates disagree in parameter count");
    ++s.succeeded;
  }
  if (s.succeeded == 0) throw FitFailedError("bootstrap: every replicate failed");

  for (auto& e : estimates) {
    for (std::size_t i = 0; i < e.size() && i < options.clamp.size(); ++i) {
      if (options.clamp[i]) e[i] = std::clamp(e[i], options.clamp[i]->lo, options.clamp[i]->hi);
    }
  }

  std::vector<bool> degenerate(estimates.size(), false);
  if (options.p_upper_index) {
    const std::size_t pi = *options.p_upper_index;
    if (pi >= dim) throw DomainError("bootstrap: p_upper index out of range");
    std::size_t zero = 0, one = 0;
    for (std::size_t b = 0; b < estimates.size(); ++b) {
      if (estimates[b].empty()) continue;
      const double p = estimates[b][pi];
      if (p <= options.degeneracy_tol) ++zero;
      if (p >= 1.0 - options.degeneracy_tol) ++one;
      degenerate[b] = p <= options.degeneracy_tol || p >= 1.0 - options.degeneracy_tol;
    }
    s.fraction_p_at_zero = static_cast<double>(zero) / static_cast<double>(s.succeeded);
    s.fraction_p_at_one = static_cast<double>(one) / static_cast<double>(s.succeeded);
  }

  const double lo_q = 0.5 * (1.0 - options.level), hi_q = 0.5 * (1.0 + options.level);
  for (std::size_t i = 0; i < dim; ++i) {
    ParameterSummary ps;
    ps.name = i < options.names.size() ? options.names[i] : "theta" + std::to_string(i);
    std::vector<double> all, kept;
    for (std::size_t b = 0; b < estimates.size(); ++b) {
      if (estimates[b].empty()) continue;
      all.push_back(estimates[b][i]);
      if (!degenerate[b]) kept.push_back(estimates[b][i]);
    }
    ps.se = stdev(all);
    ps.lower = percentile(all, lo_q);
    ps.upper = percentile(all, hi_q);
    ps.count_filtered = kept.size();
    if (!kept.empty()) {
      ps.se_filtered = stdev(kept);
      ps.lower_filtered = percentile(kept, lo_q);
      ps.upper_filtered = percentile(kept, hi_q);
    }
    s.parameters.push_back(std::move(ps));
  }
  s.estimates = std::move(estimates);
  return s;
}

BootstrapSummary bootstrap_fit(const OrderedSample& sample, const FitClosure& fit,
                               const BootstrapOptions& options) {
  validate(options);
  std::vector<std::vector<double>> estimates(options.replicates);
  const auto count = static_cast<std::int64_t>(options.replicates);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < count; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    estimates[ub] = run_replicate(sample, fit, substream(options.seed, ub));
  }
  return summarize_bootstrap(std::move(estimates), options);
}

namespace serial {

BootstrapSummary bootstrap_fit(const OrderedSample& sample, const FitClosure& fit,
                               const BootstrapOptions& options) {
  validate(options);
  std::vector<std::vector<double>> estimates;
  estimates.reserve(options.replicates);
  for (std::size_t b = 0; b < options.replicates; ++b) {
    estimates.push_back(run_replicate(sample, fit, substream(options.seed, b)));
  }
  return summarize_bootstrap(std::move(estimates), options);
}

}  // namespace serial

}  // namespace losstail
