#include "losstail/distribution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "losstail/error.hpp"

namespace losstail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<std::string_view, 2> kParetoNames{"alpha", "sigma"};
constexpr std::array<std::string_view, 3> kGpdNames{"gamma", "sigma", "location"};
constexpr std::array<std::string_view, 1> kExponentialNames{"sigma"};
constexpr std::array<std::string_view, 3> kWeibullNames{"shift", "sigma", "beta"};
constexpr std::array<std::string_view, 5> kSteppedNames{"alpha1", "alpha2", "s1", "s2", "s3"};

[[noreturn]] void reject(Family family, const std::string& why) {
  throw ParameterDomainError(std::string(family_name(family)) + ": " + why);
}

void require_positive(Family family, double v, std::string_view name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be positive and finite, got " << v;
    reject(family, os.str());
  }
}

void validate(Family family, std::span<const double> p) {
  if (p.size() != param_count(family)) {
    reject(family, "expected " + std::to_string(param_count(family)) + " parameters, got " +
                       std::to_string(p.size()));
  }
  for (double v : p) {
    if (!std::isfinite(v)) reject(family, "parameters must be finite");
  }
  switch (family) {
    case Family::Pareto:
      require_positive(family, p[0], "alpha");
      require_positive(family, p[1], "sigma");
      break;
    case Family::Gpd:
      require_positive(family, p[1], "sigma");
      if (p[2] < 0.0) reject(family, "location must be >= 0");
      break;
    case Family::Exponential:
      require_positive(family, p[0], "sigma");
      break;
    case Family::ShiftedWeibull:
      if (p[0] < 0.0) reject(family, "shift must be >= 0");
      require_positive(family, p[1], "sigma");
      require_positive(family, p[2], "beta");
      break;
    case Family::SteppedPareto:
      require_positive(family, p[0], "alpha1");
      require_positive(family, p[1], "alpha2");
      require_positive(family, p[2], "s1");
      if (!(p[2] < p[3] && p[3] < p[4])) reject(family, "breakpoints must satisfy s1 < s2 < s3");
      break;
  }
}

// Log survival of the stepped Pareto at its second and third breakpoints.
struct SteppedLevels {
  double at_s2;
  double at_s3;
};

SteppedLevels stepped_levels(std::span<const double> p) {
  const double l2 = -p[0] * std::log(p[3] / p[2]);
  return {l2, l2 - p[1] * std::log(p[4] / p[3])};
}

// ln q with q = 1 - p, whichever of the two is known more precisely.
double log_upper(double p, double q) { return p < 0.5 ? std::log1p(-p) : std::log(q); }

double invert(const DistributionSpec& spec, double log_q) {
  const auto p = spec.params();
  switch (spec.family()) {
    case Family::Pareto:
      return p[1] * std::exp(-log_q / p[0]);
    case Family::Gpd:
      if (p[0] == 0.0) return p[2] - p[1] * log_q;
      return p[2] + p[1] * std::expm1(-p[0] * log_q) / p[0];
    case Family::Exponential:
      return -p[0] * log_q;
    case Family::ShiftedWeibull:
      return p[0] + p[1] * std::pow(-log_q, 1.0 / p[2]);
    case Family::SteppedPareto: {
      const auto lv = stepped_levels(p);
      if (log_q >= lv.at_s2) return p[2] * std::exp(-log_q / p[0]);
      if (log_q >= lv.at_s3) return p[3] * std::exp((lv.at_s2 - log_q) / p[1]);
      return p[4] * std::exp((lv.at_s3 - log_q) / p[0]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::Pareto: return "pareto";
    case Family::Gpd: return "gpd";
    case Family::Exponential: return "exponential";
    case Family::ShiftedWeibull: return "shifted_weibull";
    case Family::SteppedPareto: return "stepped_pareto";
  }
  return "unknown";
}

Family parse_family(std::string_view tag) {
  for (Family f : {Family::Pareto, Family::Gpd, Family::Exponential, Family::ShiftedWeibull,
                   Family::SteppedPareto}) {
    if (family_name(f) == tag) return f;
  }
  if (tag == "weibull") return Family::ShiftedWeibull;
  throw ParameterDomainError("unknown distribution family '" + std::string(tag) + "'");
}

std::size_t param_count(Family family) noexcept { return param_names(family).size(); }

std::span<const std::string_view> param_names(Family family) noexcept {
  switch (family) {
    case Family::Pareto: return kParetoNames;
    case Family::Gpd: return kGpdNames;
    case Family::Exponential: return kExponentialNames;
    case Family::ShiftedWeibull: return kWeibullNames;
    case Family::SteppedPareto: return kSteppedNames;
  }
  return {};
}

DistributionSpec::DistributionSpec(Family family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
  validate(family_, params_);
}

DistributionSpec DistributionSpec::pareto(double alpha, double sigma) {
  return {Family::Pareto, {alpha, sigma}};
}
DistributionSpec DistributionSpec::gpd(double gamma, double sigma, double location) {
  return {Family::Gpd, {gamma, sigma, location}};
}
DistributionSpec DistributionSpec::exponential(double sigma) {
  return {Family::Exponential, {sigma}};
}
DistributionSpec DistributionSpec::shifted_weibull(double shift, double sigma, double beta) {
  return {Family::ShiftedWeibull, {shift, sigma, beta}};
}
DistributionSpec DistributionSpec::stepped_pareto(double alpha1, double alpha2, double s1,
                                                  double s2, double s3) {
  return {Family::SteppedPareto, {alpha1, alpha2, s1, s2, s3}};
}

double DistributionSpec::lower_endpoint() const noexcept {
  switch (family_) {
    case Family::Pareto: return params_[1];
    case Family::Gpd: return params_[2];
    case Family::Exponential: return 0.0;
    case Family::ShiftedWeibull: return params_[0];
    case Family::SteppedPareto: return params_[2];
  }
  return 0.0;
}

double DistributionSpec::upper_endpoint() const noexcept {
  if (family_ == Family::Gpd && params_[0] < 0.0) {
    return params_[2] + params_[1] / -params_[0];
  }
  return kInf;
}

double log_survival(const DistributionSpec& spec, double x) {
  const auto p = spec.params();
  switch (spec.family()) {
    case Family::Pareto:
      return x <= p[1] ? 0.0 : -p[0] * std::log(x / p[1]);
    case Family::Gpd: {
      const double z = x - p[2];
      if (z <= 0.0) return 0.0;
      if (p[0] == 0.0) return -z / p[1];
      const double t = p[0] * z / p[1];
      if (t <= -1.0) return -kInf;
      return -std::log1p(t) / p[0];
    }
    case Family::Exponential:
      return x <= 0.0 ? 0.0 : -x / p[0];
    case Family::ShiftedWeibull:
      return x <= p[0] ? 0.0 : -std::pow((x - p[0]) / p[1], p[2]);
    case Family::SteppedPareto: {
      if (x <= p[2]) return 0.0;
      if (x <= p[3]) return -p[0] * std::log(x / p[2]);
      const auto lv = stepped_levels(p);
      if (x <= p[4]) return lv.at_s2 - p[1] * std::log(x / p[3]);
      return lv.at_s3 - p[0] * std::log(x / p[4]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double survival(const DistributionSpec& spec, double x) { return std::exp(log_survival(spec, x)); }

double cdf(const DistributionSpec& spec, double x) { return -std::expm1(log_survival(spec, x)); }

double log_cdf(const DistributionSpec& spec, double x) {
  const double ls = log_survival(spec, x);
  // ln(1 - e^ls): log1p form when the survival is small.
  return ls < -0.693 ? std::log1p(-std::exp(ls)) : std::log(-std::expm1(ls));
}

double density(const DistributionSpec& spec, double x) {
  const auto p = spec.params();
  switch (spec.family()) {
    case Family::Pareto:
      return x < p[1] ? 0.0 : p[0] / x * std::pow(p[1] / x, p[0]);
    case Family::Gpd: {
      const double z = x - p[2];
      if (z < 0.0 || x > spec.upper_endpoint()) return 0.0;
      if (p[0] == 0.0) return std::exp(-z / p[1]) / p[1];
      return std::exp(-(1.0 / p[0] + 1.0) * std::log1p(p[0] * z / p[1])) / p[1];
    }
    case Family::Exponential:
      return x < 0.0 ? 0.0 : std::exp(-x / p[0]) / p[0];
    case Family::ShiftedWeibull: {
      if (x < p[0]) return 0.0;
      const double z = (x - p[0]) / p[1];
      return p[2] / p[1] * std::pow(z, p[2] - 1.0) * std::exp(-std::pow(z, p[2]));
    }
    case Family::SteppedPareto: {
      if (x < p[2]) return 0.0;
      const double exponent = (x > p[3] && x <= p[4]) ? p[1] : p[0];
      return exponent / x * survival(spec, x);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double quantile(const DistributionSpec& spec, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("quantile: probability must lie in (0,1), got " + std::to_string(p));
  }
  return invert(spec, log_upper(p, 1.0 - p));
}

double inverse_survival(const DistributionSpec& spec, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("inverse_survival: probability must lie in (0,1), got " + std::to_string(q));
  }
  return invert(spec, std::log(q));
}

double draw(const DistributionSpec& spec, Rng& rng) { return invert(spec, std::log(rng.uniform())); }

OrderedSample::OrderedSample(std::vector<double> values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  if (values_.empty()) throw DomainError("sample must contain at least one value");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw DomainError("sample value #" + std::to_string(i + 1) +
                        " is not a positive finite number");
    }
  }
  std::sort(values_.begin(), values_.end());
}

double OrderedSample::at_rank(std::size_t i) const {
  if (i < 1 || i > values_.size()) throw DomainError("rank out of range");
  return values_[i - 1];
}

OrderedSample OrderedSample::scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("scale factor must be positive");
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return OrderedSample(std::move(v), label_);
}

std::vector<double> OrderedSample::in_range(double lo, double hi) const {
  auto first = std::lower_bound(values_.begin(), values_.end(), lo);
  auto last = std::upper_bound(first, values_.end(), hi);
  return {first, last};
}

OrderedSample sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample: n must be >= 1");
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = draw(spec, rng);
  return OrderedSample(std::move(v), std::string(family_name(spec.family())));
}

double edf_position(std::size_t i, std::size_t n) {
  if (n < 1 || i < 1 || i > n) {
    throw DomainError("edf_position: rank " + std::to_string(i) + " outside [1, " +
                      std::to_string(n) + "]");
  }
  return static_cast<double>(i) / static_cast<double>(n + 1);
}

double EmpiricalCdf::cdf(double x) const noexcept {
  const auto v = sample_.values();
  const auto count = std::upper_bound(v.begin(), v.end(), x) - v.begin();
  return static_cast<double>(count) / static_cast<double>(v.size() + 1);
}

double EmpiricalCdf::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: probability must lie in (0,1)");
  const std::size_t n = sample_.size();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n + 1) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sample_.at_rank(rank);
}

double cdf(const CdfSource& source, double x) {
  return std::visit(
      [x](const auto& s) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, EmpiricalCdf>) {
          return s.cdf(x);
        } else {
          return cdf(s, x);
        }
      },
      source);
}

double mixture_cdf(const CdfSource& f1, const CdfSource& f2, double p, double x) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("mixture_cdf: mixing probability must lie in [0,1]");
  }
  if (p == 0.0) return cdf(f1, x);
  if (p == 1.0) return cdf(f2, x);
  return (1.0 - p) * cdf(f1, x) + p * cdf(f2, x);
}

}  // namespace losstail
