#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "losstail/random.hpp"

namespace losstail {

enum class Family { Pareto, Gpd, Exponential, ShiftedWeibull, SteppedPareto };

std::string_view family_name(Family family) noexcept;
/// Inverse of family_name; throws ParameterDomainError on unknown tags.
Family parse_family(std::string_view tag);
std::size_t param_count(Family family) noexcept;
/// Parameter names in storage order, e.g. {"alpha", "sigma"} for Pareto.
std::span<const std::string_view> param_names(Family family) noexcept;

/// A parametric claim-size family with a validated parameter vector.
///
/// Parameter layout:
///   Pareto         alpha, sigma                 survival (sigma/x)^alpha, x >= sigma
///   Gpd            gamma, sigma, location       excesses z = x - location
///   Exponential    sigma
///   ShiftedWeibull shift, sigma, beta           survival exp(-((x-shift)/sigma)^beta)
///   SteppedPareto  alpha1, alpha2, s1, s2, s3   three Pareto segments, continuous
class DistributionSpec {
 public:
  DistributionSpec(Family family, std::vector<double> params);

  static DistributionSpec pareto(double alpha, double sigma);
  static DistributionSpec gpd(double gamma, double sigma, double location = 0.0);
  static DistributionSpec exponential(double sigma);
  static DistributionSpec shifted_weibull(double shift, double sigma, double beta);
  static DistributionSpec stepped_pareto(double alpha1, double alpha2, double s1, double s2,
                                         double s3);

  Family family() const noexcept { return family_; }
  std::span<const double> params() const noexcept { return params_; }
  double param(std::size_t i) const { return params_.at(i); }

  /// Infimum of the support.
  double lower_endpoint() const noexcept;
  /// Supremum of the support; +inf unless a GPD with gamma < 0.
  double upper_endpoint() const noexcept;

  bool operator==(const DistributionSpec&) const = default;

 private:
  Family family_;
  std::vector<double> params_;
};

double survival(const DistributionSpec& spec, double x);
double cdf(const DistributionSpec& spec, double x);
/// ln survival(x), accurate far into the upper tail.
double log_survival(const DistributionSpec& spec, double x);
/// ln cdf(x), accurate close to the left endpoint.
double log_cdf(const DistributionSpec& spec, double x);
double density(const DistributionSpec& spec, double x);

/// Closed-form inverse cdf; p must lie in (0, 1).
double quantile(const DistributionSpec& spec, double p);
/// Inverse survival function, quantile(1 - q) without the cancellation.
double inverse_survival(const DistributionSpec& spec, double q);

/// Inverse of a non-increasing survival function by bisection.
///
/// Brackets [left, hi] with hi doubled until survival(hi) < q, then bisects
/// until the bracket stops shrinking or reaches relative width `rel_tol`.
template <class Survival>
double bisect_inverse_survival(Survival&& surv, double left, double q, double rel_tol = 1e-15);

/// One inverse-transform draw.
double draw(const DistributionSpec& spec, Rng& rng);

/// Sorted positive losses with provenance label.
class OrderedSample {
 public:
  /// Sorts `values`; throws DomainError if empty or any entry is not a
  /// strictly positive finite number.
  explicit OrderedSample(std::vector<double> values, std::string label = {});

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  /// 0-based access.
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  /// 1-based order statistic x_i.
  double at_rank(std::size_t i) const;
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }
  const std::string& label() const noexcept { return label_; }

  /// Every value multiplied by c > 0.
  OrderedSample scaled(double c) const;
  /// Values x with lo <= x <= hi, in order (possibly empty).
  std::vector<double> in_range(double lo, double hi) const;

 private:
  std::vector<double> values_;
  std::string label_;
};

/// n i.i.d. inverse-transform draws, deterministic in `seed`.
OrderedSample sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

/// Plotting position i/(n+1) of rank i (1-based) in a sample of size n.
double edf_position(std::size_t i, std::size_t n);

/// Step function with value i/(n+1) on [x_i, x_{i+1}).
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(OrderedSample sample) : sample_(std::move(sample)) {}

  double cdf(double x) const noexcept;
  /// Smallest order statistic whose plotting position reaches p.
  double quantile(double p) const;
  const OrderedSample& sample() const noexcept { return sample_; }

 private:
  OrderedSample sample_;
};

using CdfSource = std::variant<DistributionSpec, EmpiricalCdf>;

double cdf(const CdfSource& source, double x);

/// Discrete mixture (1 - p) F1(x) + p F2(x).
double mixture_cdf(const CdfSource& f1, const CdfSource& f2, double p, double x);

// ---------------------------------------------------------------------------

template <class Survival>
double bisect_inverse_survival(Survival&& surv, double left, double q, double rel_tol) {
  double lo = left;
  double step = left > 0.0 ? left : 1.0;
  double hi = left + step;
  while (surv(hi) >= q) {
    lo = hi;
    step *= 2.0;
    hi = left + step;
    if (!(hi < 1e300)) return hi;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= rel_tol * hi) break;
    if (surv(mid) >= q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace losstail
