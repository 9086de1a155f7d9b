#include "losstail/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "losstail/error.hpp"
#include "mad_internal.hpp"

namespace losstail {

namespace detail {

MadCoefficients::MadCoefficients(std::size_t n, RankRange range, Weighting w)
    : maximise(is_maximised(w)) {
  const double nn = static_cast<double>(n);
  for (std::size_t i = range.lo; i <= range.hi; ++i) {
    const double di = static_cast<double>(i);
    if (w == Weighting::Unweighted) {
      a.push_back((di - 0.5) / nn);
      b.push_back((nn - di + 0.5) / nn);
    } else {
      const double wi = mad_weight(i, n, w);
      a.push_back(wi * di);
      b.push_back(wi * (nn - di + 1.0));
    }
  }
}

RankRange resolve_range(const std::optional<RankRange>& range, std::size_t n) {
  const RankRange r = range.value_or(RankRange{1, n});
  if (r.lo < 1 || r.lo > r.hi || r.hi > n) {
    std::ostringstream os;
    os << "rank range [" << r.lo << ", " << r.hi << "] outside [1, " << n << "]";
    throw DomainError(os.str());
  }
  return r;
}

}  // namespace detail

namespace {

using detail::log1mexp;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(i/(n+1)) and ln(1 - i/(n+1)) without cancellation.
LogProb expected_log_prob(std::size_t i, std::size_t n) {
  const double l = std::log(static_cast<double>(n + 1));
  return {std::log(static_cast<double>(i)) - l, std::log(static_cast<double>(n + 1 - i)) - l};
}

}  // namespace

double ad_statistic(const OrderedSample& sample, const DistributionSpec& spec) {
  const std::size_t n = sample.size();
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double x = sample.at_rank(i);
    const double ls = log_survival(spec, x);
    const double lc = log1mexp(ls);
    if (!std::isfinite(ls) || !std::isfinite(lc)) {
      std::ostringstream os;
      os << "ad_statistic: cdf is 0 or 1 at observation " << i << " (x = " << x << ")";
      throw LogDomainError(i, os.str());
    }
    const double di = static_cast<double>(i), dn = static_cast<double>(n);
    sum += (2.0 * di - 1.0) * lc + (2.0 * (dn - di) + 1.0) * ls;
  }
  return -static_cast<double>(n) - sum / static_cast<double>(n);
}

std::string_view weighting_name(Weighting w) noexcept {
  switch (w) {
    case Weighting::Unweighted: return "unweighted";
    case Weighting::Normalized: return "normalized";
    case Weighting::SqrtPreference: return "sqrt";
  }
  return "unknown";
}

Weighting parse_weighting(std::string_view tag) {
  for (Weighting w : {Weighting::Unweighted, Weighting::Normalized, Weighting::SqrtPreference}) {
    if (weighting_name(w) == tag) return w;
  }
  throw InputError("unknown weighting '" + std::string(tag) + "' (unweighted|normalized|sqrt)");
}

double mad_weight(std::size_t i, std::size_t n, Weighting w) {
  if (i < 1 || i > n) throw DomainError("mad_weight: rank out of range");
  if (w == Weighting::Unweighted) return 1.0 / static_cast<double>(n);
  const LogProb e = expected_log_prob(i, n);
  const double denom =
      static_cast<double>(i) * e.log_cdf + static_cast<double>(n - i + 1) * e.log_sf;
  const double base = 1.0 / denom;
  return w == Weighting::SqrtPreference ? std::sqrt(static_cast<double>(i)) * base : base;
}

double mad_summand(std::size_t i, std::size_t n, const LogProb& lp, Weighting w) {
  const double di = static_cast<double>(i), dn = static_cast<double>(n);
  if (w == Weighting::Unweighted) {
    return ((di - 0.5) * lp.log_cdf + (dn - di + 0.5) * lp.log_sf) / dn;
  }
  return mad_weight(i, n, w) * (di * lp.log_cdf + (dn - di + 1.0) * lp.log_sf);
}

double mad_sum(std::size_t n, RankRange range, std::span<const LogProb> log_probs, Weighting w) {
  range = detail::resolve_range(range, n);
  if (log_probs.size() != range.hi - range.lo + 1) {
    throw DomainError("mad_sum: one log-probability pair per included rank required");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < log_probs.size(); ++k) {
    const std::size_t i = range.lo + k;
    if (!std::isfinite(log_probs[k].log_cdf) || !std::isfinite(log_probs[k].log_sf)) {
      throw LogDomainError(i, "mad objective: cdf is 0 or 1 at rank " + std::to_string(i));
    }
    total += mad_summand(i, n, log_probs[k], w);
  }
  return total;
}

double mad_objective(const OrderedSample& sample, const DistributionSpec& spec,
                     const MadConfig& config) {
  const std::size_t n = sample.size();
  const RankRange r = detail::resolve_range(config.rank_range, n);
  std::vector<LogProb> lp;
  lp.reserve(r.hi - r.lo + 1);
  for (std::size_t i = r.lo; i <= r.hi; ++i) {
    const double ls = log_survival(spec, sample.at_rank(i));
    lp.push_back({log1mexp(ls), ls});
  }
  return mad_sum(n, r, lp, config.weighting);
}

// ---------------------------------------------------------------------------

FamilyTemplate::FamilyTemplate(Family f)
    : family(f), fixed(param_count(f)), bounds(param_count(f)), start(param_count(f)) {
  switch (f) {
    case Family::Pareto:
      bounds = {{0.0, kInf}, {0.0, kInf}};
      break;
    case Family::Gpd:
      bounds = {{-kInf, kInf}, {0.0, kInf}, {0.0, kInf}};
      fixed[2] = 0.0;
      break;
    case Family::Exponential:
      bounds = {{0.0, kInf}};
      break;
    case Family::ShiftedWeibull:
      bounds = {{0.0, kInf}, {0.0, kInf}, {0.0, kInf}};
      fixed[0] = 0.0;
      break;
    case Family::SteppedPareto:
      bounds = {{0.0, kInf}, {0.0, kInf}, {0.0, kInf}, {0.0, kInf}, {0.0, kInf}};
      break;
  }
}

FamilyTemplate& FamilyTemplate::fix(std::size_t i, double value) {
  fixed.at(i) = value;
  return *this;
}

FamilyTemplate& FamilyTemplate::bound(std::size_t i, double lo, double hi) {
  bounds.at(i) = Bounds{lo, hi};
  fixed.at(i).reset();
  return *this;
}

FamilyTemplate& FamilyTemplate::start_at(std::size_t i, double value) {
  start.at(i) = value;
  return *this;
}

std::size_t FamilyTemplate::free_count() const noexcept {
  return static_cast<std::size_t>(std::count(fixed.begin(), fixed.end(), std::nullopt));
}

FamilyTemplate FamilyTemplate::gpd_excess(double location) {
  return FamilyTemplate(Family::Gpd).fix(2, location);
}

FamilyTemplate FamilyTemplate::pareto_fixed_scale(double sigma) {
  return FamilyTemplate(Family::Pareto).fix(1, sigma);
}

double FitResult::value(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return theta_hat[i];
  }
  throw DomainError("fit result has no parameter '" + std::string(name) + "'");
}

DistributionSpec FitResult::spec() const {
  if (!family) throw DomainError("fit result does not describe a single family");
  const std::size_t k = param_count(*family);
  return DistributionSpec(*family, std::vector<double>(theta_hat.begin(), theta_hat.begin() + k));
}

namespace {

// Two included ranks used by the quantile-matching start values.
std::pair<std::size_t, std::size_t> anchor_ranks(RankRange r) {
  std::size_t i1 = r.lo + (r.hi - r.lo) / 4;
  std::size_t i2 = r.lo + 3 * (r.hi - r.lo) / 4;
  if (i1 == i2) {
    i1 = r.lo;
    i2 = r.hi;
  }
  return {i1, i2};
}

// GPD shape matching the excess ratio z2/z1 at upper probabilities q1 > q2.
double gpd_shape_from_ratio(double ratio, double lq1, double lq2) {
  auto r = [&](double g) {
    if (std::abs(g) < 1e-12) return lq2 / lq1;
    return std::expm1(-g * lq2) / std::expm1(-g * lq1);
  };
  double lo = -0.95, hi = 20.0;
  if (ratio <= r(lo)) return lo;
  if (ratio >= r(hi)) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (r(mid) < ratio ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Full parameter vector to start the search from: user start values, then
// fixed values, then quantile matching at two included ranks.
std::vector<double> default_start(const FamilyTemplate& t, const OrderedSample& sample, RankRange r) {
  const std::size_t n = sample.size();
  const auto [i1, i2] = anchor_ranks(r);
  const double x1 = sample.at_rank(i1), x2 = sample.at_rank(i2);
  const double lq1 = std::log1p(-edf_position(i1, n)), lq2 = std::log1p(-edf_position(i2, n));
  const double xmin = sample.at_rank(r.lo), xmax = sample.at_rank(r.hi);
  auto pick = [&](std::size_t i, double guess) {
    if (t.start[i]) return *t.start[i];
    if (t.fixed[i]) return *t.fixed[i];
    return guess;
  };
  std::vector<double> p(param_count(t.family));
  switch (t.family) {
    case Family::Pareto: {
      const double a = (x2 > x1) ? (lq1 - lq2) / std::log(x2 / x1) : 1.0;
      p[0] = pick(0, a);
      p[1] = pick(1, std::min(x1 * std::exp(lq1 / p[0]), 0.99 * xmin));
      break;
    }
    case Family::Gpd: {
      p[2] = pick(2, 0.0);
      const double z1 = x1 - p[2], z2 = x2 - p[2];
      double g = 0.5, s = std::max(z1, 1e-12 * std::max(1.0, xmax));
      if (z1 > 0.0 && z2 > z1) {
        g = gpd_shape_from_ratio(z2 / z1, lq1, lq2);
        s = std::abs(g) < 1e-12 ? -z1 / lq1 : z1 * g / std::expm1(-g * lq1);
      }
      p[0] = pick(0, g);
      if (p[0] < 0.0 && p[2] + s / -p[0] <= xmax) p[0] = t.fixed[0] ? p[0] : 0.05;
      p[1] = pick(1, s);
      break;
    }
    case Family::Exponential:
      p[0] = pick(0, -x2 / lq2);
      break;
    case Family::ShiftedWeibull: {
      p[0] = pick(0, 0.0);
      const double z1 = x1 - p[0], z2 = x2 - p[0];
      double beta = 1.0, s = std::max(z2, 1e-12);
      if (z1 > 0.0 && z2 > z1) {
        beta = (std::log(-lq2) - std::log(-lq1)) / std::log(z2 / z1);
        beta = std::clamp(beta, t.bounds[2].lo > 0 ? t.bounds[2].lo : 1e-3,
                          std::isfinite(t.bounds[2].hi) ? t.bounds[2].hi : 1e3);
        s = z2 * std::pow(-lq2, -1.0 / beta);
      }
      p[1] = pick(1, s);
      p[2] = pick(2, beta);
      break;
    }
    case Family::SteppedPareto: {
      const double a = (x2 > x1) ? (lq1 - lq2) / std::log(x2 / x1) : 1.0;
      p[0] = pick(0, a);
      p[1] = pick(1, a);
      p[2] = pick(2, 0.99 * xmin);
      p[3] = pick(3, std::max(x1, p[2] * 1.01));
      p[4] = pick(4, std::max(x2, p[3] * 1.01));
      break;
    }
  }
  // Keep the start strictly inside the free parameters' bounds.
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (t.fixed[i]) continue;
    const auto& b = t.bounds[i];
    if (std::isfinite(b.lo) && std::isfinite(b.hi)) {
      p[i] = std::clamp(p[i], b.lo + 1e-6 * (b.hi - b.lo), b.hi - 1e-6 * (b.hi - b.lo));
    } else if (std::isfinite(b.lo) && !(p[i] > b.lo)) {
      p[i] = b.lo + std::max(1.0, std::abs(b.lo)) * 1e-3;
    } else if (std::isfinite(b.hi) && !(p[i] < b.hi)) {
      p[i] = b.hi - std::max(1.0, std::abs(b.hi)) * 1e-3;
    }
  }
  return p;
}

void validate_template(const FamilyTemplate& t) {
  const std::size_t k = param_count(t.family);
  if (t.fixed.size() != k || t.bounds.size() != k || t.start.size() != k) {
    throw DomainError("family template has the wrong number of parameters");
  }
  if (t.free_count() == 0) throw DomainError("family template has no free parameter");
}

}  // namespace

FitResult fit_mad(const OrderedSample& sample, const FamilyTemplate& family,
                  const MadConfig& config) {
  validate_template(family);
  const std::size_t n = sample.size();
  const RankRange r = detail::resolve_range(config.rank_range, n);
  const std::size_t included = r.hi - r.lo + 1;
  if (included < family.free_count() + 1) {
    throw DomainError("fit_mad: rank range holds " + std::to_string(included) +
                      " observations, need at least " + std::to_string(family.free_count() + 1));
  }
  const detail::MadCoefficients coef(n, r, config.weighting);
  const auto xs = sample.values().subspan(r.lo - 1, included);

  const std::vector<double> full_start = default_start(family, sample, r);
  std::vector<std::size_t> free_idx;
  std::vector<double> start;
  std::vector<Bounds> bounds;
  for (std::size_t i = 0; i < full_start.size(); ++i) {
    if (family.fixed[i]) continue;
    free_idx.push_back(i);
    start.push_back(full_start[i]);
    bounds.push_back(family.bounds[i]);
  }

  auto assemble = [&](std::span<const double> theta) {
    std::vector<double> p = full_start;
    for (std::size_t k = 0; k < free_idx.size(); ++k) p[free_idx[k]] = theta[k];
    return p;
  };
  const Objective loss = [&](std::span<const double> theta) {
    try {
      const DistributionSpec spec(family.family, assemble(theta));
      return coef.loss(coef.objective(xs, [&](double x) { return log_survival(spec, x); }));
    } catch (const ParameterDomainError&) {
      return kInf;
    }
  };

  const OptimizeResult opt = minimize_bounded(loss, start, bounds, config.optimizer);
  if (!std::isfinite(opt.value)) {
    std::ostringstream os;
    os << "fit_mad(" << family_name(family.family) << "): no restart reached a finite objective ("
       << opt.evaluations << " evaluations, " << included << " observations in ranks " << r.lo
       << ".." << r.hi << ")";
    throw FitFailedError(os.str());
  }

  FitResult out;
  out.component = "base";
  out.family = family.family;
  for (auto nm : param_names(family.family)) out.names.emplace_back(nm);
  out.theta_hat = assemble(opt.x);
  for (std::size_t i = 0; i < family.fixed.size(); ++i) out.is_free.push_back(!family.fixed[i]);
  out.objective_value = coef.maximise ? -opt.value : opt.value;
  out.converged = opt.converged;
  out.evaluations = opt.evaluations;
  out.included = included;
  out.config = config;
  out.config.rank_range = r;
  return out;
}

FitResult fit_gpd_ml(const OrderedSample& sample, double location,
                     const OptimizerOptions& optimizer) {
  std::vector<double> z;
  for (double x : sample.values()) {
    if (x > location) z.push_back(x - location);
  }
  if (z.size() < 3) throw DomainError("fit_gpd_ml: fewer than 3 excesses over the location");
  const double m = static_cast<double>(z.size());

  const Objective negloglik = [&](std::span<const double> th) {
    const double g = th[0], s = th[1];
    if (!(s > 0.0)) return kInf;
    double ll = 0.0;
    for (double v : z) {
      if (g == 0.0) {
        ll -= v / s;
      } else {
        const double t = g * v / s;
        if (t <= -1.0) return kInf;
        ll -= (1.0 / g + 1.0) * std::log1p(t);
      }
    }
    return -(ll / m - std::log(s));
  };

  // Start from quantile matching on the excess sample itself.
  const OrderedSample excess(z);
  const FamilyTemplate t = FamilyTemplate::gpd_excess(0.0);
  const auto p0 = default_start(t, excess, RankRange{1, excess.size()});
  const std::vector<double> start{p0[0], p0[1]};
  const std::vector<Bounds> bounds{{-kInf, kInf}, {0.0, kInf}};
  const OptimizeResult opt = minimize_bounded(negloglik, start, bounds, optimizer);
  if (!std::isfinite(opt.value)) throw FitFailedError("fit_gpd_ml: likelihood is not finite");

  FitResult out;
  out.component = "base";
  out.family = Family::Gpd;
  out.names = {"gamma", "sigma", "location"};
  out.theta_hat = {opt.x[0], opt.x[1], location};
  out.is_free = {true, true, false};
  out.objective_value = -opt.value;
  out.converged = opt.converged;
  out.evaluations = opt.evaluations;
  out.included = z.size();
  out.config.weighting = Weighting::Unweighted;
  out.config.optimizer = optimizer;
  return out;
}

// ---------------------------------------------------------------------------

TailIndexEstimate hill_estimate(const OrderedSample& sample, std::size_t k) {
  const std::size_t n = sample.size();
  if (k < 1 || k >= n) {
    throw DomainError("hill_estimate: k = " + std::to_string(k) + " outside [1, " +
                      std::to_string(n - 1) + "]");
  }
  const double threshold = sample.at_rank(n - k);
  if (!(threshold > 0.0)) throw DomainError("hill_estimate: threshold must be positive");
  double sum = 0.0;
  for (std::size_t j = n - k + 1; j <= n; ++j) sum += std::log(sample.at_rank(j) / threshold);
  const double g = sum / static_cast<double>(k);
  return {g, g / std::sqrt(static_cast<double>(k)), k, threshold};
}

TailIndexEstimate hill_above(const OrderedSample& sample, double threshold) {
  if (!(threshold > 0.0)) throw DomainError("hill_above: threshold must be positive");
  const auto v = sample.values();
  const auto first = std::upper_bound(v.begin(), v.end(), threshold);
  const auto k = static_cast<std::size_t>(v.end() - first);
  if (k == 0) throw DomainError("hill_above: no observation above the threshold");
  double sum = 0.0;
  for (auto it = first; it != v.end(); ++it) sum += std::log(*it / threshold);
  const double g = sum / static_cast<double>(k);
  return {g, g / std::sqrt(static_cast<double>(k)), k, threshold};
}

TailIndexEstimate spacings_estimate(const OrderedSample& sample, double lo, double hi) {
  const auto v = sample.values();
  const std::size_t n = v.size();
  const auto first = static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), lo) - v.begin());
  const auto last = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), hi) - v.begin());
  if (last < first + 3) {
    throw DomainError("spacings_estimate: fewer than 3 observations in the value range");
  }
  double sum = 0.0;
  bool any_positive = false;
  // 0-based index j is rank j + 1.
  for (std::size_t j = first + 1; j < last; ++j) {
    const double d = static_cast<double>(n - j) * (std::log(v[j]) - std::log(v[j - 1]));
    any_positive = any_positive || d > 0.0;
    sum += d;
  }
  if (!any_positive) throw DomainError("spacings_estimate: all spacings in the range are zero");
  const std::size_t count = last - first - 1;
  const double g = sum / static_cast<double>(count);
  return {g, g / std::sqrt(static_cast<double>(count)), count, v[first]};
}

}  // namespace losstail
