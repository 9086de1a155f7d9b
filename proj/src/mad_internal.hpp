#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "losstail/estimation.hpp"

namespace losstail::detail {

/// ln(1 - e^l) for l <= 0.
inline double log1mexp(double l) {
  return l < -0.693 ? std::log1p(-std::exp(l)) : std::log(-std::expm1(l));
}

/// Precomputed linear coefficients of a MAD objective:
/// objective = sum_k a[k] ln F(x_k) + b[k] ln(1 - F(x_k)).
struct MadCoefficients {
  std::vector<double> a;
  std::vector<double> b;
  bool maximise = false;

  MadCoefficients(std::size_t n, RankRange range, Weighting w);

  /// Objective from log survival values; -inf/NaN propagate as NaN.
  template <class LogSf>
  double objective(std::span<const double> xs, LogSf&& log_sf) const {
    double total = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double ls = log_sf(xs[k]);
      const double lc = log1mexp(ls);
      if (!std::isfinite(ls) || !std::isfinite(lc)) return std::numeric_limits<double>::quiet_NaN();
      total += a[k] * lc + b[k] * ls;
    }
    return total;
  }

  /// Value handed to the minimiser.
  double loss(double objective) const {
    if (!std::isfinite(objective)) return std::numeric_limits<double>::infinity();
    return maximise ? -objective : objective;
  }
};

/// Resolves an optional rank range against sample size n; throws DomainError
/// when it does not satisfy 1 <= lo <= hi <= n.
RankRange resolve_range(const std::optional<RankRange>& range, std::size_t n);

}  // namespace losstail::detail
