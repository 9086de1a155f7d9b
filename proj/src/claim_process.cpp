#include "losstail/claim_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "losstail/error.hpp"
#include "losstail/random.hpp"

namespace losstail {

namespace {

void require_count(std::size_t n) {
  if (n < 1) throw DomainError("sample size must be >= 1");
}

template <class Combine>
OrderedSample sample_pairwise(const DistributionSpec& y, const DistributionSpec& w, std::size_t n,
                              std::uint64_t seed, Combine combine) {
  require_count(n);
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) {
    const double a = draw(y, rng);
    const double b = draw(w, rng);
    x = combine(a, b);
  }
  return OrderedSample(std::move(v));
}

double retention(const ThinningSpec& spec, double y) {
  return spec.no_thinning ? 1.0 : -std::expm1(-y / spec.thinning_scale);
}

// Interior points where the base density has a kink.
std::vector<double> breakpoints(const DistributionSpec& base) {
  if (base.family() == Family::SteppedPareto) return {base.param(3), base.param(4)};
  return {};
}

double integrate(const ThinningSpec& spec, double a, double b) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto f = [&](double y) { return density(spec.base, y) * retention(spec, y); };
  std::vector<double> cuts{a};
  for (double c : breakpoints(spec.base)) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    total += Quad::integrate(f, cuts[i], cuts[i + 1], 20, 1e-13, &err);
    if (!(err <= 1e-11)) throw NumericFailure("thinned_cdf: quadrature did not converge");
  }
  return total;
}

// Right integration limit where f * (1 - G) has dropped below 1e-16 of its peak.
double integration_limit(const ThinningSpec& spec, double left) {
  auto f = [&](double y) { return density(spec.base, y) * retention(spec, y); };
  const double scale = std::max(quantile(spec.base, 0.5) - left, 1e-12);
  double peak = 0.0;
  for (int i = 1; i <= 64; ++i) peak = std::max(peak, f(left + scale * i / 32.0));
  double y = left + 2.0 * scale;
  for (int it = 0; it < 200; ++it) {
    const double v = f(y);
    peak = std::max(peak, v);
    if (v < 1e-16 * peak) return y;
    y = left + 2.0 * (y - left);
  }
  throw NumericFailure("thinned_cdf: weighted density does not decay");
}

}  // namespace

OrderedSample sample_min_principle(const DistributionSpec& y, const DistributionSpec& w,
                                   std::size_t n, std::uint64_t seed) {
  return sample_pairwise(y, w, n, seed, [](double a, double b) { return std::min(a, b); });
}

OrderedSample sample_max_principle(const DistributionSpec& y, const DistributionSpec& w,
                                   std::size_t n, std::uint64_t seed) {
  return sample_pairwise(y, w, n, seed, [](double a, double b) { return std::max(a, b); });
}

OrderedSample sample_mechanism(const AdjustedModel& model, std::size_t n, std::uint64_t seed) {
  require_count(n);
  Rng rng(seed);
  const auto& up = model.upper();
  const auto& lo = model.lower();
  std::vector<double> v(n);
  for (double& x : v) {
    x = draw(model.base(), rng);
    if (up && rng.uniform() < up->p_upper) x = std::min(x, draw(up->adjuster, rng));
    if (lo) x = std::max(x, draw(lo->adjuster, rng));
  }
  return OrderedSample(std::move(v), "mechanism");
}

double thinning_probability(const ThinningSpec& spec, double y) {
  return 1.0 - retention(spec, y);
}

double thinned_cdf(const ThinningSpec& spec, double x) {
  if (!(spec.thinning_scale > 0.0)) throw ParameterDomainError("thinning scale must be > 0");
  if (x < 0.0) throw DomainError("thinned_cdf: x must be >= 0");
  if (spec.no_thinning) return cdf(spec.base, x);
  const double left = std::max(0.0, spec.base.lower_endpoint());
  if (x <= left) return 0.0;
  const double limit = integration_limit(spec, left);
  const double total = integrate(spec, left, limit);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericFailure("thinned_cdf: weighted density integrates to zero");
  }
  if (x >= limit) return 1.0;
  return std::clamp(integrate(spec, left, x) / total, 0.0, 1.0);
}

double thinned_cdf_closed(double sigma, double sigma_t, double x) {
  if (!(sigma > 0.0) || !(sigma_t > 0.0)) {
    throw ParameterDomainError("thinned_cdf_closed: scales must be > 0");
  }
  if (x < 0.0) throw DomainError("thinned_cdf_closed: x must be >= 0");
  const double bracket = (sigma + sigma_t) * std::exp(-x / sigma) -
                         sigma_t * std::exp(-x * (sigma + sigma_t) / (sigma * sigma_t));
  return 1.0 - bracket / sigma;
}

OrderedSample sample_thinned(const ThinningSpec& spec, std::size_t n, std::uint64_t seed) {
  require_count(n);
  if (!(spec.thinning_scale > 0.0)) throw ParameterDomainError("thinning scale must be > 0");
  Rng rng(seed);
  std::vector<double> v;
  v.reserve(n);
  std::size_t rejected_in_row = 0;
  while (v.size() < n) {
    const double y = draw(spec.base, rng);
    if (rng.uniform() < retention(spec, y)) {
      v.push_back(y);
      rejected_in_row = 0;
    } else if (++rejected_in_row > 10'000'000) {
      throw NumericFailure("sample_thinned: acceptance probability is vanishingly small");
    }
  }
  return OrderedSample(std::move(v), "thinned");
}

OrderedSample ScenarioResult::pooled_raw() const {
  std::vector<double> v;
  for (const auto& y : years) v.insert(v.end(), y.raw.begin(), y.raw.end());
  return OrderedSample(std::move(v), "raw");
}

OrderedSample ScenarioResult::pooled_inflated() const {
  std::vector<double> v;
  for (const auto& y : years) v.insert(v.end(), y.inflated.begin(), y.inflated.end());
  return OrderedSample(std::move(v), "inflated");
}

ScenarioResult simulate_inflation_scenario(const InflationScenario& sc, std::uint64_t seed) {
  if (!(sc.alpha > 0.0)) throw ParameterDomainError("scenario: alpha must be > 0");
  if (!(sc.inflation_factor > 0.0)) throw ParameterDomainError("scenario: inflation factor must be > 0");
  if (sc.years < 1) throw ParameterDomainError("scenario: years must be >= 1");
  if (!(sc.threshold > 0.0)) throw ParameterDomainError("scenario: threshold must be > 0");
  if (!(sc.base_rate > 0.0)) throw ParameterDomainError("scenario: base rate must be > 0");

  const auto sizes = DistributionSpec::pareto(sc.alpha, sc.threshold);
  ScenarioResult result;
  result.years.resize(static_cast<std::size_t>(sc.years));
  for (int k = 1; k <= sc.years; ++k) {
    Rng rng(substream(seed, static_cast<std::uint64_t>(k)));
    const double mean = sc.base_rate * std::pow(sc.inflation_factor, k - 1);
    const auto count = std::poisson_distribution<long>(mean)(rng.engine());
    auto& year = result.years[static_cast<std::size_t>(k - 1)];
    year.year = k;
    year.raw.resize(static_cast<std::size_t>(count));
    for (double& x : year.raw) x = draw(sizes, rng);
    std::sort(year.raw.begin(), year.raw.end());
    const double to_final = std::pow(sc.inflation_factor, sc.years - k);
    year.inflated = year.raw;
    for (double& x : year.inflated) x *= to_final;
  }
  return result;
}

}  // namespace losstail
