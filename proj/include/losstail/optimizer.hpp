#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace losstail {

struct Bounds {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  bool operator==(const Bounds&) const = default;
};

struct OptimizerOptions {
  /// Independent simplex searches; the first starts at the supplied point,
  /// the others at deterministic perturbations of it.
  int restarts = 5;
  /// Relative simplex size (in the unconstrained coordinates) at which a
  /// search stops.
  double rel_tol = 1e-8;
  int max_evaluations = 5000;
  /// Two best restarts must agree to this relative tolerance for the result
  /// to be flagged converged.
  double agreement_tol = 1e-5;
};

struct OptimizeResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::size_t evaluations = 0;
  /// Restarts that reached a finite objective value.
  int successful_restarts = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Bounded Nelder-Mead minimisation with restarts.
///
/// Bounds are handled by reparameterisation: a logistic map on a finite
/// interval, an exponential map on a half-line, identity otherwise. Scale-like
/// parameters bounded below by 0 are therefore searched on the log scale,
/// which makes the search equivariant under rescaling of the data. Non-finite
/// objective values are treated as +inf.
OptimizeResult minimize_bounded(const Objective& f, std::span<const double> start,
                                std::span<const Bounds> bounds, const OptimizerOptions& options);

}  // namespace losstail
