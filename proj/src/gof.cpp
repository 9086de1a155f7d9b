#include "losstail/gof.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "losstail/error.hpp"
#include "losstail/estimation.hpp"
#include "losstail/random.hpp"

namespace losstail {

namespace detail {

// One null replicate: k sorted Pareto(alpha, sigma) draws, Hill refit, statistic.
std::size_t null_replicate(std::size_t k, double sigma, double alpha, std::uint64_t seed,
                           std::vector<double>& scratch) {
  Rng rng(seed);
  scratch.resize(k);
  const auto pareto = DistributionSpec::pareto(alpha, sigma);
  for (double& t : scratch) t = draw(pareto, rng);
  std::sort(scratch.begin(), scratch.end());
  double log_sum = 0.0;
  for (double t : scratch) log_sum += std::log(t / sigma);
  const double gamma = log_sum / static_cast<double>(k);
  return tail_run_statistic(scratch, sigma, 1.0 / gamma);
}

}  // namespace detail

RunLengths run_lengths(std::span<const double> edf_vals, std::span<const double> model_vals) {
  if (edf_vals.size() != model_vals.size()) {
    throw DomainError("run_lengths: vectors differ in length");
  }
  RunLengths r;
  r.l.resize(edf_vals.size());
  std::size_t prev = 0;
  for (std::size_t i = 0; i < edf_vals.size(); ++i) {
    prev = edf_vals[i] > model_vals[i] ? prev + 1 : 0;
    r.l[i] = prev;
    r.m = std::max(r.m, prev);
  }
  return r;
}

std::size_t tail_run_statistic(std::span<const double> tail_sorted, double sigma, double alpha) {
  const std::size_t k = tail_sorted.size();
  std::size_t run = 0, best = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double edf = static_cast<double>(i + 1) / static_cast<double>(k + 1);
    const double model = -std::expm1(-alpha * std::log(tail_sorted[i] / sigma));
    run = edf > model ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

std::vector<std::size_t> simulate_null_run_statistics(std::size_t k, double sigma, double alpha,
                                                      std::size_t reps, std::uint64_t seed) {
  std::vector<std::size_t> out(reps);
  const auto count = static_cast<std::int64_t>(reps);
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < count; ++r) {
      out[static_cast<std::size_t>(r)] =
          detail::null_replicate(k, sigma, alpha, substream(seed, static_cast<std::uint64_t>(r)), scratch);
    }
  }
  return out;
}

double run_statistic_tail_probability(std::size_t k, std::size_t m, std::size_t reps,
                                      std::uint64_t seed) {
  if (k < 1 || reps < 1) throw DomainError("run statistic: k and reps must be >= 1");
  // The statistic is invariant under the Pareto parameters; unit values suffice.
  const auto null = simulate_null_run_statistics(k, 1.0, 1.0, reps, seed);
  const auto hits = std::count_if(null.begin(), null.end(), [m](std::size_t v) { return v >= m; });
  return static_cast<double>(hits) / static_cast<double>(reps);
}

TailTestResult pareto_tail_test(const OrderedSample& sample, std::size_t k, std::size_t reps,
                                std::uint64_t seed) {
  const std::size_t n = sample.size();
  if (k < 3) throw DomainError("pareto_tail_test: k must be >= 3");
  if (k >= n) throw DomainError("pareto_tail_test: k must be below the sample size");
  if (reps < 1) throw DomainError("pareto_tail_test: reps must be >= 1");

  TailTestResult r;
  r.k = k;
  r.reps = reps;
  r.seed = seed;
  const auto hill = hill_estimate(sample, k);
  r.sigma = hill.threshold;
  if (!(hill.gamma_hat > 0.0)) {
    throw DomainError("pareto_tail_test: all tail values equal the threshold");
  }
  r.alpha_hat = 1.0 / hill.gamma_hat;
  const auto tail = sample.values().subspan(n - k);
  if (tail.front() == r.sigma) {
    r.warnings.emplace_back("ties at the threshold observation; test proceeds");
  }
  r.m = tail_run_statistic(tail, r.sigma, r.alpha_hat);

  const auto null = simulate_null_run_statistics(k, r.sigma, r.alpha_hat, reps, seed);
  const auto hits = std::count_if(null.begin(), null.end(), [&](std::size_t v) { return v >= r.m; });
  r.p_value = static_cast<double>(hits) / static_cast<double>(reps);
  r.reject_5pct = r.p_value < 0.05;
  return r;
}

// ---------------------------------------------------------------------------

std::string_view margins_name(Margins m) noexcept {
  switch (m) {
    case Margins::Original: return "original";
    case Margins::StandardNormal: return "normal";
    case Margins::StandardFrechet: return "frechet";
  }
  return "unknown";
}

Margins parse_margins(std::string_view tag) {
  for (Margins m : {Margins::Original, Margins::StandardNormal, Margins::StandardFrechet}) {
    if (margins_name(m) == tag) return m;
  }
  throw InputError("unknown margins '" + std::string(tag) + "' (original|normal|frechet)");
}

double model_cdf(const AnyModel& model, double x) {
  return std::visit(
      [x](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DistributionSpec>) return cdf(m, x);
        else if constexpr (std::is_same_v<T, AdjustedModel>) return adjusted_cdf(m, x);
        else return m.cdf(x);
      },
      model);
}

double model_survival(const AnyModel& model, double x) {
  return std::visit(
      [x](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DistributionSpec>) return survival(m, x);
        else if constexpr (std::is_same_v<T, AdjustedModel>) return adjusted_survival(m, x);
        else return 1.0 - m.cdf(x);
      },
      model);
}

double model_quantile(const AnyModel& model, double p) {
  return std::visit(
      [p](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DistributionSpec>) return quantile(m, p);
        else if constexpr (std::is_same_v<T, AdjustedModel>) return adjusted_quantile(m, p);
        else return m.quantile(p);
      },
      model);
}

QqResult qq_coordinates(const OrderedSample& sample, const AnyModel& model, Margins margins) {
  const boost::math::normal standard;
  const std::size_t n = sample.size();
  QqResult out;
  out.points.reserve(n);
  // Transform of a value with model cdf F; NaN when undefined.
  auto transform = [&](double x) -> double {
    if (margins == Margins::Original) return x;
    const double f = model_cdf(model, x);
    if (!(f > 0.0 && f < 1.0)) return std::nan("");
    if (margins == Margins::StandardNormal) return boost::math::quantile(standard, f);
    return -1.0 / std::log(f);
  };
  for (std::size_t i = 1; i <= n; ++i) {
    const double theo = transform(model_quantile(model, edf_position(i, n)));
    const double emp = transform(sample.at_rank(i));
    if (std::isnan(theo) || std::isnan(emp)) {
      ++out.dropped;
      continue;
    }
    out.points.push_back({theo, emp});
  }
  return out;
}

std::vector<TablePoint> edf_table(const OrderedSample& sample) {
  std::vector<TablePoint> t;
  const std::size_t n = sample.size();
  t.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) t.push_back({sample.at_rank(i), edf_position(i, n)});
  return t;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0 && hi > lo) || points < 2) throw DomainError("log_grid: need 0 < lo < hi, points >= 2");
  std::vector<double> g(points);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace losstail
