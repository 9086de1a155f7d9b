#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "losstail/error.hpp"
#include "losstail/estimation.hpp"
#include "losstail/resampling.hpp"
#include "oracles.hpp"

using namespace losstail;

TEST_CASE("resamples are deterministic with replacement") {
  const auto s = sample(DistributionSpec::exponential(1.0), 200, 1);
  const auto a = bootstrap_resample(s, 5);
  const auto b = bootstrap_resample(s, 5);
  CHECK(a.size() == s.size());
  CHECK(std::vector<double>(a.values().begin(), a.values().end()) ==
        std::vector<double>(b.values().begin(), b.values().end()));
  for (double x : a.values()) CHECK(std::binary_search(s.values().begin(), s.values().end(), x));
  const auto c = bootstrap_resample(s, 6);
  CHECK(std::vector<double>(a.values().begin(), a.values().end()) !=
        std::vector<double>(c.values().begin(), c.values().end()));
}

TEST_CASE("constant closure") {
  const auto s = sample(DistributionSpec::exponential(1.0), 50, 1);
  BootstrapOptions o;
  o.replicates = 30;
  o.p_upper_index = 1;
  o.names = {"a", "p_upper"};
  const auto r = bootstrap_fit(s, [](const OrderedSample&) { return std::vector<double>{2.0, 0.5}; }, o);
  CHECK(r.succeeded == 30);
  CHECK(r.failed == 0);
  CHECK(r.parameters.size() == 2);
  CHECK(r.parameters[0].name == "a");
  CHECK(r.parameters[0].se == 0.0);
  CHECK(r.parameters[0].lower == 2.0);
  CHECK(r.parameters[0].upper == 2.0);
  CHECK(r.fraction_p_at_zero == 0.0);
  CHECK(r.fraction_p_at_one == 0.0);
  CHECK(r.seed == o.seed);
}

TEST_CASE("statistics against a direct computation") {
  const auto s = sample(DistributionSpec::pareto(2.0, 1.0), 300, 3);
  const FitClosure mean_fit = [](const OrderedSample& x) { return std::vector<double>{oracle::mean(x.values())}; };
  BootstrapOptions o;
  o.replicates = 400;
  o.seed = 9;
  const auto r = bootstrap_fit(s, mean_fit, o);

  std::vector<double> direct;
  for (std::size_t b = 0; b < o.replicates; ++b) direct.push_back(mean_fit(bootstrap_resample(s, substream(9, b)))[0]);
  CHECK(r.parameters[0].se == doctest::Approx(oracle::sd(direct)).epsilon(1e-12));
  std::sort(direct.begin(), direct.end());
  // type-7 percentile at 5%: h = 0.05 * 399 = 19.95
  CHECK(r.parameters[0].lower == doctest::Approx(direct[19] + 0.95 * (direct[20] - direct[19])).epsilon(1e-14));
  CHECK(r.parameters[0].lower <= r.parameters[0].upper);
  // Bootstrap SE of the mean is close to the plug-in value sd / sqrt(n).
  CHECK(r.parameters[0].se == doctest::Approx(oracle::sd(s.values()) / std::sqrt(300.0)).epsilon(0.5));
}

TEST_CASE("parallel and serial agree and are deterministic") {
  const auto s = sample(DistributionSpec::gpd(0.4, 2.0), 400, 2);
  OptimizerOptions opt;
  opt.restarts = 1;
  const FitClosure ml = [opt](const OrderedSample& x) { return fit_gpd_ml(x, 0.0, opt).theta_hat; };
  BootstrapOptions o;
  o.replicates = 40;
  o.seed = 77;
  const auto a = bootstrap_fit(s, ml, o);
  const auto b = bootstrap_fit(s, ml, o);
  const auto c = serial::bootstrap_fit(s, ml, o);
  CHECK(a.estimates == b.estimates);
  CHECK(a.estimates == c.estimates);
  CHECK(a.parameters[0].se == c.parameters[0].se);
}

TEST_CASE("failures are excluded and counted") {
  const auto s = sample(DistributionSpec::exponential(1.0), 100, 1);
  const double cut = s.at_rank(95);
  // Fails whenever the resample misses the largest observation.
  const FitClosure picky = [&](const OrderedSample& x) -> std::vector<double> {
    if (x.max() < s.max()) throw std::runtime_error("unstable");
    return {x.at_rank(50), x.max() > cut ? 1.0 : 0.0};
  };
  BootstrapOptions o;
  o.replicates = 200;
  const auto r = bootstrap_fit(s, picky, o);
  CHECK(r.failed > 0);
  CHECK(r.failed + r.succeeded == 200);

  std::vector<std::vector<double>> kept;
  for (const auto& e : r.estimates) {
    if (!e.empty()) kept.push_back(e);
  }
  const auto only = summarize_bootstrap(kept, o);
  CHECK(only.parameters[0].se == r.parameters[0].se);
  CHECK(only.parameters[0].lower == r.parameters[0].lower);

  BootstrapOptions never = o;
  never.replicates = 5;
  CHECK_THROWS_AS(
      bootstrap_fit(s, [](const OrderedSample&) -> std::vector<double> { throw std::runtime_error("x"); }, never),
      FitFailedError);
  // Non-finite estimates count as failures.
  const auto nan_r = bootstrap_fit(
      s, [&](const OrderedSample& x) { return std::vector<double>{x.max() == s.max() ? std::nan("") : 1.0}; }, o);
  CHECK(nan_r.failed == r.succeeded);
}

TEST_CASE("degenerate p_upper accounting and clamping") {
  // Replicate b returns p = 0, 1 or 0.5 in a fixed pattern.
  std::vector<std::vector<double>> est;
  for (int b = 0; b < 100; ++b) {
    const double p = b < 5 ? 0.0 : (b < 15 ? 1.0 - 1e-4 : 0.5);
    est.push_back({static_cast<double>(b), p, b == 0 ? 250.0 : 2.0});
  }
  est.push_back({});
  BootstrapOptions o;
  o.p_upper_index = 1;
  o.clamp = {std::nullopt, std::nullopt, Bounds{0.5, 100.0}};
  const auto r = summarize_bootstrap(est, o);
  CHECK(r.failed == 1);
  CHECK(r.fraction_p_at_zero == doctest::Approx(0.05));
  CHECK(r.fraction_p_at_one == doctest::Approx(0.10));
  CHECK(r.parameters[1].count_filtered == 85);
  CHECK(r.parameters[0].lower_filtered >= 15.0);
  CHECK(r.parameters[2].upper <= 100.0);
  CHECK(r.estimates[0][2] == 100.0);
  CHECK_THROWS_AS(summarize_bootstrap({{1.0}, {1.0, 2.0}}, BootstrapOptions{}), DomainError);
}

TEST_CASE("bootstrap SE of a GPD fit") {
  const auto s = sample(DistributionSpec::gpd(0.65, 600.0), 9181, 31);
  MadConfig c;
  c.optimizer.restarts = 2;
  const FitClosure mad = [c](const OrderedSample& x) { return fit_mad(x, FamilyTemplate(Family::Gpd), c).theta_hat; };
  BootstrapOptions o;
  o.replicates = 200;
  o.names = {"gamma", "sigma", "location"};
  const auto r = bootstrap_fit(s, mad, o);
  CHECK(r.parameters[0].se >= 0.012);
  CHECK(r.parameters[0].se <= 0.025);
}

TEST_CASE("percentile interval coverage") {
  OptimizerOptions opt;
  opt.restarts = 1;
  const FitClosure ml = [opt](const OrderedSample& x) { return fit_gpd_ml(x, 0.0, opt).theta_hat; };
  int covered = 0;
  for (std::uint64_t outer = 0; outer < 100; ++outer) {
    const auto s = sample(DistributionSpec::gpd(0.5, 1.0), 500, 7000 + outer);
    BootstrapOptions o;
    o.replicates = 200;
    o.seed = outer;
    const auto r = bootstrap_fit(s, ml, o);
    covered += r.parameters[0].lower <= 0.5 && 0.5 <= r.parameters[0].upper;
  }
  CHECK(covered >= 80);
}
