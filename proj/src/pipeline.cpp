#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "losstail/error.hpp"
#include "losstail/estimation.hpp"
#include "mad_internal.hpp"

namespace losstail {

namespace {

using detail::log1mexp;

constexpr double kInf = std::numeric_limits<double>::infinity();

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

// Upper adjuster parameters (excluding p_upper) as a DistributionSpec.
DistributionSpec upper_adjuster(Family family, double x_upper, std::span<const double> theta) {
  if (family == Family::ShiftedWeibull) {
    return DistributionSpec::shifted_weibull(x_upper, theta[0], theta[1]);
  }
  return DistributionSpec::pareto(theta[0], x_upper);
}

FitResult fit_upper(const std::vector<double>& tail, const DistributionSpec& base, double x_upper,
                    const PipelinePlan& plan) {
  const Family family = *plan.upper_family;
  const std::size_t m = tail.size();
  const detail::MadCoefficients coef(m, RankRange{1, m}, plan.upper_config.weighting);
  const double ls_at_threshold = log_survival(base, x_upper);

  std::vector<double> excess(tail.size());
  for (std::size_t k = 0; k < tail.size(); ++k) excess[k] = tail[k] - x_upper;
  const double scale0 = std::max(median(excess), 1e-12 * x_upper);

  std::vector<double> start;
  std::vector<Bounds> bounds;
  if (family == Family::ShiftedWeibull) {
    start = {scale0, std::clamp(2.0, plan.beta_bounds.lo, plan.beta_bounds.hi)};
    bounds = {{0.0, kInf}, plan.beta_bounds};
  } else {
    start = {1.0};
    bounds = {{0.0, kInf}};
  }
  start.push_back(0.5);
  bounds.push_back({0.0, 1.0});
  const std::size_t pi = start.size() - 1;

  const Objective loss = [&](std::span<const double> th) {
    try {
      const DistributionSpec adj = upper_adjuster(family, x_upper, th);
      const double p = th[pi];
      return coef.loss(coef.objective(tail, [&](double x) {
        return log_survival(base, x) - ls_at_threshold +
               std::log(p * survival(adj, x) + (1.0 - p));
      }));
    } catch (const ParameterDomainError&) {
      return kInf;
    }
  };
  const OptimizeResult opt = minimize_bounded(loss, start, bounds, plan.upper_config.optimizer);
  if (!std::isfinite(opt.value)) throw FitFailedError("pipeline upper step: objective not finite");

  FitResult out;
  out.component = "upper";
  out.family = family;
  if (family == Family::ShiftedWeibull) {
    out.names = {"shift", "sigma", "beta", "p_upper"};
    out.theta_hat = {x_upper, opt.x[0], opt.x[1], opt.x[2]};
    out.is_free = {false, true, true, true};
  } else {
    out.names = {"alpha", "sigma", "p_upper"};
    out.theta_hat = {opt.x[0], x_upper, opt.x[1]};
    out.is_free = {true, false, true};
  }
  double& p = out.theta_hat.back();
  if (p < plan.boundary_snap) p = 0.0;
  if (p > 1.0 - plan.boundary_snap) p = 1.0;
  out.objective_value = coef.maximise ? -opt.value : opt.value;
  out.converged = opt.converged;
  out.evaluations = opt.evaluations;
  out.included = m;
  out.config = plan.upper_config;
  out.config.rank_range = RankRange{1, m};
  return out;
}

FitResult fit_lower(const std::vector<double>& below, const DistributionSpec& base, double x_lower,
                    const PipelinePlan& plan) {
  const std::size_t m = below.size();
  const detail::MadCoefficients coef(m, RankRange{1, m}, plan.lower_config.weighting);
  const double lc_at_threshold = log_cdf(base, x_lower);

  const Objective loss = [&](std::span<const double> th) {
    try {
      const DistributionSpec adj = pinned_lower_gpd(th[0], x_lower);
      return coef.loss(coef.objective(below, [&](double x) {
        return log1mexp(log_cdf(base, x) + log_cdf(adj, x) - lc_at_threshold);
      }));
    } catch (const ParameterDomainError&) {
      return kInf;
    }
  };
  const std::vector<double> start{-0.5};
  const std::vector<Bounds> bounds{{-kInf, 0.0}};
  const OptimizeResult opt = minimize_bounded(loss, start, bounds, plan.lower_config.optimizer);
  if (!std::isfinite(opt.value)) throw FitFailedError("pipeline lower step: objective not finite");

  const DistributionSpec adj = pinned_lower_gpd(opt.x[0], x_lower);
  FitResult out;
  out.component = "lower";
  out.family = Family::Gpd;
  out.names = {"gamma", "sigma", "location"};
  out.theta_hat = {adj.param(0), adj.param(1), adj.param(2)};
  out.is_free = {true, false, false};
  out.objective_value = coef.maximise ? -opt.value : opt.value;
  out.converged = opt.converged;
  out.evaluations = opt.evaluations;
  out.included = m;
  out.config = plan.lower_config;
  out.config.rank_range = RankRange{1, m};
  return out;
}

}  // namespace

PipelineResult fit_pipeline(const OrderedSample& sample, const PipelinePlan& plan) {
  if (plan.x_lower && plan.x_upper && !(*plan.x_lower < *plan.x_upper)) {
    throw DomainError("fit_pipeline: x_lower must be below x_upper");
  }
  if (plan.upper_family && *plan.upper_family != Family::ShiftedWeibull &&
      *plan.upper_family != Family::Pareto) {
    throw DomainError("fit_pipeline: upper adjuster must be shifted_weibull or pareto");
  }
  if (plan.lower_family && *plan.lower_family != Family::Gpd) {
    throw DomainError("fit_pipeline: lower adjuster must be gpd");
  }
  const auto v = sample.values();
  const double lo = plan.x_lower.value_or(-kInf);
  const double hi = plan.x_upper.value_or(kInf);
  const auto first = static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), lo) - v.begin());
  const auto last = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), hi) - v.begin());
  if (last <= first) throw FitFailedError("fit_pipeline: no observation between the thresholds");

  MadConfig base_config = plan.base_config;
  RankRange range{first + 1, last};
  if (base_config.rank_range) {
    range.lo = std::max(range.lo, base_config.rank_range->lo);
    range.hi = std::min(range.hi, base_config.rank_range->hi);
  }
  base_config.rank_range = range;
  FamilyTemplate base_family = plan.base;
  // An upper adjustment needs a base without a finite right endpoint.
  if (plan.x_upper && plan.upper_family && base_family.family == Family::Gpd) {
    base_family.bounds[0].lo = std::max(base_family.bounds[0].lo, 0.0);
  }
  FitResult base_fit = fit_mad(sample, base_family, base_config);
  const DistributionSpec base = base_fit.spec();

  std::vector<std::string> warnings;
  std::optional<FitResult> upper_fit;
  std::optional<UpperAdjustment> upper;
  if (plan.x_upper && plan.upper_family) {
    std::vector<double> tail(v.begin() + static_cast<std::ptrdiff_t>(last), v.end());
    if (tail.empty()) {
      warnings.emplace_back("upper step skipped: no observation above x_upper");
    } else if (!(survival(base, *plan.x_upper) > 0.0)) {
      warnings.emplace_back("upper step skipped: base survival vanishes at x_upper");
    } else {
      upper_fit = fit_upper(tail, base, *plan.x_upper, plan);
      const auto& th = upper_fit->theta_hat;
      upper = UpperAdjustment{upper_fit->spec(), th.back(), *plan.x_upper};
    }
  }

  std::optional<FitResult> lower_fit;
  std::optional<LowerAdjustment> lower;
  if (plan.x_lower && plan.lower_family) {
    // Observations strictly below x_lower.
    const auto below_end = std::lower_bound(v.begin(), v.end(), *plan.x_lower);
    std::vector<double> below(v.begin(), below_end);
    if (below.empty()) {
      warnings.emplace_back("lower step skipped: no observation below x_lower");
    } else if (!(cdf(base, below.front()) > 0.0)) {
      warnings.emplace_back("lower step skipped: base cdf vanishes below x_lower");
    } else {
      lower_fit = fit_lower(below, base, *plan.x_lower, plan);
      lower = LowerAdjustment{lower_fit->spec(), *plan.x_lower};
    }
  }

  return PipelineResult{AdjustedModel(base, std::move(upper), std::move(lower)), std::move(base_fit),
                        std::move(upper_fit), std::move(lower_fit), std::move(warnings)};
}

}  // namespace losstail
