#include <doctest.h>

#include <cmath>

#include "losstail/claim_process.hpp"
#include "losstail/error.hpp"
#include "losstail/estimation.hpp"
#include "losstail/gof.hpp"
#include "losstail/tail_model.hpp"
#include "oracles.hpp"

using namespace losstail;

namespace {

AdjustedModel weibull_model(double p) {
  return AdjustedModel(DistributionSpec::pareto(1.0, 1.0),
                       UpperAdjustment{DistributionSpec::shifted_weibull(3.0, 25.0, 2.0), p, 3.0});
}

AdjustedModel two_sided_model(double p) {
  return AdjustedModel(DistributionSpec::gpd(0.5, 1000.0),
                       UpperAdjustment{DistributionSpec::shifted_weibull(8e5, 9e6, 1.9), p, 8e5},
                       LowerAdjustment{pinned_lower_gpd(-0.75, 3500.0), 3500.0});
}

}  // namespace

TEST_CASE("adjusted survival reference values") {
  CHECK(adjusted_survival(weibull_model(1.0), 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const auto m0 = weibull_model(0.0);
  for (double x = 1.0; x < 1e6; x *= 1.7) CHECK(adjusted_survival(m0, x) == survival(m0.base(), x));

  const auto half = weibull_model(0.5);
  CHECK(std::fabs(adjusted_survival(half, 1e4) / survival(half.base(), 1e4) - 0.5) < 1e-6);
  // Direct evaluation of the mixture at a point inside the transition range.
  const double x = 30.0;
  const double direct = (1.0 / x) * (0.5 * std::exp(-std::pow((x - 3.0) / 25.0, 2.0)) + 0.5);
  CHECK(adjusted_survival(half, x) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("model invariants are enforced") {
  const auto w = DistributionSpec::shifted_weibull(3.0, 25.0, 2.0);
  const auto base = DistributionSpec::pareto(1.0, 1.0);
  CHECK_THROWS_AS(AdjustedModel(base, UpperAdjustment{w, 1.2, 3.0}), ModelInvalidError);
  CHECK_THROWS_AS(AdjustedModel(base, UpperAdjustment{w, -0.1, 3.0}), ModelInvalidError);
  CHECK_THROWS_AS(AdjustedModel(base, UpperAdjustment{w, 0.5, 3.0},
                                LowerAdjustment{pinned_lower_gpd(-0.5, 5.0), 5.0}),
                  ModelInvalidError);
  CHECK_THROWS_AS(AdjustedModel(DistributionSpec::gpd(-0.2, 1.0), UpperAdjustment{w, 0.5, 3.0}),
                  ModelInvalidError);
  CHECK_THROWS_AS(AdjustedModel(base, UpperAdjustment{DistributionSpec::gpd(-0.2, 10.0), 0.5, 3.0}),
                  ModelInvalidError);
}

TEST_CASE("adjusted survival is monotone and matches the base between the thresholds") {
  for (double p : {0.0, 0.3, 1.0}) {
    for (const auto& m : {weibull_model(p), two_sided_model(p)}) {
      const auto grid = log_grid(1e-2, 1e9, 10'000);
      double prev = 1.0;
      for (double x : grid) {
        const double s = adjusted_survival(m, x);
        CHECK(s <= prev);
        CHECK(s >= 0.0);
        prev = s;
      }
    }
    const auto m = two_sided_model(p);
    for (double x : log_grid(3500.0, 8e5, 500)) {
      CHECK(std::fabs(adjusted_cdf(m, x) - cdf(m.base(), x)) <= 1e-14);
    }
  }
  // Below x_lower: product of cdfs.
  const auto m = two_sided_model(0.5);
  const double x = 1000.0;
  CHECK(adjusted_cdf(m, x) ==
        doctest::Approx(cdf(m.base(), x) * cdf(m.lower()->adjuster, x)).epsilon(1e-14));
  CHECK(adjusted_log_cdf(m, x) == doctest::Approx(std::log(adjusted_cdf(m, x))).epsilon(1e-12));
  CHECK(adjusted_log_survival(m, 1e7) ==
        doctest::Approx(std::log(adjusted_survival(m, 1e7))).epsilon(1e-12));
}

TEST_CASE("adjusted quantile") {
  const AdjustedModel plain(DistributionSpec::gpd(0.4, 2.0));
  for (double p : {0.01, 0.5, 0.99}) {
    CHECK(adjusted_quantile(plain, p) == doctest::Approx(quantile(plain.base(), p)).epsilon(1e-12));
  }
  const auto full = weibull_model(1.0);
  // base quantile 0.5 -> 2 < x_upper = 3
  CHECK(adjusted_quantile(full, 0.5) == doctest::Approx(2.0).epsilon(1e-12));

  const auto half = weibull_model(0.5);
  const double q = adjusted_quantile(half, 0.99);
  CHECK(q > 3.0);
  CHECK(std::fabs(adjusted_cdf(half, q) - 0.99) < 1e-9);
  for (double p = 0.001; p < 1.0; p += 0.01237) {
    const auto m = two_sided_model(0.7);
    CHECK(std::fabs(adjusted_cdf(m, adjusted_quantile(m, p)) - p) < 1e-9);
  }
  CHECK_THROWS_AS(adjusted_quantile(half, 1.0), DomainError);
}

TEST_CASE("transition probability limit") {
  CHECK(std::fabs(transition_probability_limit(weibull_model(0.5), 1e4) - 0.5) < 1e-6);
  for (double x : {5.0, 50.0, 5e3}) CHECK(transition_probability_limit(weibull_model(0.0), x) == 0.0);

  // Slowly decaying adjuster: increasing towards 1 but below it at finite probes.
  const AdjustedModel slow(DistributionSpec::pareto(1.0, 1.0),
                           UpperAdjustment{DistributionSpec::shifted_weibull(3.0, 1e3, 0.5), 1.0, 3.0});
  double prev = 0.0;
  for (double x : {10.0, 100.0, 1e3, 1e4, 1e5}) {
    const double t = transition_probability_limit(slow, x);
    CHECK(t < 1.0);
    CHECK(t > prev);
    prev = t;
  }
  CHECK_THROWS_AS(transition_probability_limit(AdjustedModel(DistributionSpec::pareto(1.0, 1.0)), 10.0),
                  ModelInvalidError);
  CHECK_THROWS_AS(transition_probability_limit(
                      AdjustedModel(DistributionSpec::pareto(50.0, 1.0),
                                    UpperAdjustment{DistributionSpec::shifted_weibull(3.0, 25.0, 2.0), 0.5, 3.0}),
                      1e300),
                  NumericFailure);
}

TEST_CASE("mixing asymptote at the base 1 - 1e-6 quantile") {
  const auto m = weibull_model(0.37);
  const double x = quantile(m.base(), 1.0 - 1e-6);
  REQUIRE(survival(m.upper()->adjuster, x) < 1e-9);
  CHECK(std::fabs(transition_probability_limit(m, x) - 0.37) < 1e-3);
}

TEST_CASE("composed extreme value index") {
  CHECK(composed_ev_index(1.0, 1.0, 1.0) == 0.5);
  CHECK(composed_ev_index(0.76, 123.0, 0.404) == 0.76);
  CHECK(composed_ev_index(1.0, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(composed_ev_index(0.0, 1.0, 1.0), DomainError);
}

TEST_CASE("tail index composition by simulation") {
  const AdjustedModel product(DistributionSpec::pareto(1.0, 1.0),
                              UpperAdjustment{DistributionSpec::pareto(1.0, 1.0), 1.0, 1.0});
  const auto s = sample_mechanism(product, 1'000'000, 3);
  const auto h = hill_estimate(s, s.size() / 100);
  CHECK(std::fabs(h.gamma_hat - 0.5) < 0.05);
}

TEST_CASE("condition validation") {
  const auto r = validate_conditions(two_sided_model(0.5), 1e-12);
  CHECK(r.upper_deviation == 0.0);
  CHECK(r.lower_deviation == 0.0);
  CHECK(r.pass);

  const AdjustedModel overlap(DistributionSpec::pareto(1.0, 1.0),
                              UpperAdjustment{DistributionSpec::shifted_weibull(0.0, 25.0, 2.0), 0.5, 3.0});
  const auto bad = validate_conditions(overlap, 1e-6);
  CHECK(bad.upper_deviation > 0.0);
  CHECK_FALSE(bad.pass);
}
