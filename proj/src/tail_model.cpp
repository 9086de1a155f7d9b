#include "losstail/tail_model.hpp"

#include <cmath>
#include <limits>

#include "losstail/error.hpp"

namespace losstail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(1 - e^l) for l <= 0.
double log1mexp(double l) {
  return l < -0.693 ? std::log1p(-std::exp(l)) : std::log(-std::expm1(l));
}

}  // namespace

AdjustedModel::AdjustedModel(DistributionSpec base, std::optional<UpperAdjustment> upper,
                             std::optional<LowerAdjustment> lower)
    : base_(std::move(base)), upper_(std::move(upper)), lower_(std::move(lower)) {
  if (upper_) {
    if (!(upper_->p_upper >= 0.0 && upper_->p_upper <= 1.0)) {
      throw ModelInvalidError("p_upper must lie in [0,1]");
    }
    if (!std::isfinite(upper_->x_upper)) throw ModelInvalidError("x_upper must be finite");
    if (std::isfinite(base_.upper_endpoint()) || std::isfinite(upper_->adjuster.upper_endpoint())) {
      throw ModelInvalidError("upper tail mixture requires infinite right endpoints");
    }
  }
  if (lower_ && !std::isfinite(lower_->x_lower)) throw ModelInvalidError("x_lower must be finite");
  if (upper_ && lower_ && !(lower_->x_lower < upper_->x_upper)) {
    throw ModelInvalidError("x_lower must be below x_upper");
  }
}

DistributionSpec pinned_lower_gpd(double gamma, double x_lower) {
  if (!(gamma < 0.0)) throw ParameterDomainError("pinned lower GPD needs gamma < 0");
  if (!(x_lower > 0.0)) throw ParameterDomainError("pinned lower GPD needs x_lower > 0");
  return DistributionSpec::gpd(gamma, -gamma * x_lower, 0.0);
}

double adjusted_log_survival(const AdjustedModel& model, double x) {
  const auto& up = model.upper();
  if (up && x >= up->x_upper) {
    const double ls = log_survival(model.base(), x);
    const double mix =
        up->p_upper * survival(up->adjuster, x) + (1.0 - up->p_upper);
    return ls + std::log(mix);
  }
  const auto& lo = model.lower();
  if (lo && x <= lo->x_lower) {
    return log1mexp(log_cdf(model.base(), x) + log_cdf(lo->adjuster, x));
  }
  return log_survival(model.base(), x);
}

double adjusted_log_cdf(const AdjustedModel& model, double x) {
  const auto& lo = model.lower();
  if (lo && x <= lo->x_lower) {
    return log_cdf(model.base(), x) + log_cdf(lo->adjuster, x);
  }
  const auto& up = model.upper();
  if (up && x >= up->x_upper) return log1mexp(adjusted_log_survival(model, x));
  return log_cdf(model.base(), x);
}

double adjusted_survival(const AdjustedModel& model, double x) {
  return std::exp(adjusted_log_survival(model, x));
}

double adjusted_cdf(const AdjustedModel& model, double x) {
  const auto& lo = model.lower();
  if (lo && x <= lo->x_lower) {
    return cdf(model.base(), x) * cdf(lo->adjuster, x);
  }
  return -std::expm1(adjusted_log_survival(model, x));
}

double adjusted_quantile(const AdjustedModel& model, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("adjusted_quantile: probability must lie in (0,1)");
  }
  if (!model.upper() && !model.lower()) return quantile(model.base(), p);
  // Bisect on whichever side of the composite is better conditioned.
  const double left = model.base().lower_endpoint();
  if (p < 0.5) {
    return bisect_inverse_survival([&](double x) { return 1.0 - adjusted_cdf(model, x); }, left,
                                   1.0 - p);
  }
  return bisect_inverse_survival([&](double x) { return adjusted_survival(model, x); }, left,
                                 1.0 - p);
}

double transition_probability_limit(const AdjustedModel& model, double x_probe) {
  const auto& up = model.upper();
  if (!up) throw ModelInvalidError("transition_probability_limit needs an upper adjustment");
  const double sb = survival(model.base(), x_probe);
  if (!(sb >= std::numeric_limits<double>::min())) {
    throw NumericFailure("base survival underflows at the probe point");
  }
  return -std::expm1(adjusted_log_survival(model, x_probe) - log_survival(model.base(), x_probe));
}

double composed_ev_index(double gamma_base, double gamma_adj, double p_upper) {
  if (!(gamma_base > 0.0)) throw DomainError("composed_ev_index: gamma_base must be > 0");
  if (!(gamma_adj >= 0.0)) throw DomainError("composed_ev_index: gamma_adj must be >= 0");
  if (!(p_upper >= 0.0 && p_upper <= 1.0)) throw DomainError("p_upper must lie in [0,1]");
  if (p_upper < 1.0) return gamma_base;
  if (gamma_adj == 0.0) return 0.0;
  return 1.0 / (1.0 / gamma_base + 1.0 / gamma_adj);
}

ConditionReport validate_conditions(const AdjustedModel& model, double tol) {
  constexpr int kPoints = 2001;
  constexpr double kDecades = 6.0;
  ConditionReport r;
  r.tolerance = tol;
  if (const auto& up = model.upper()) {
    for (int i = 0; i < kPoints; ++i) {
      const double x = up->x_upper * std::pow(10.0, -kDecades * (kPoints - 1 - i) / (kPoints - 1));
      r.upper_deviation = std::max(r.upper_deviation, -std::expm1(log_survival(up->adjuster, x)));
    }
  }
  if (const auto& lo = model.lower()) {
    for (int i = 0; i < kPoints; ++i) {
      const double x = lo->x_lower * std::pow(10.0, kDecades * i / (kPoints - 1));
      r.lower_deviation = std::max(r.lower_deviation, std::exp(log_survival(lo->adjuster, x)));
    }
  }
  r.pass = r.upper_deviation <= tol && r.lower_deviation <= tol;
  return r;
}

}  // namespace losstail
