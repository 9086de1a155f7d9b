#include "losstail/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "losstail/error.hpp"
#include "losstail/random.hpp"

namespace losstail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Map { Identity, Logistic, LowerExp, UpperExp };

struct Coordinate {
  Map map;
  Bounds b;

  double to_external(double z) const {
    switch (map) {
      case Map::Identity: return z;
      case Map::Logistic: {
        const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
        return std::clamp(b.lo + (b.hi - b.lo) * s, b.lo, b.hi);
      }
      case Map::LowerExp: return b.lo + std::exp(z);
      case Map::UpperExp: return b.hi - std::exp(z);
    }
    return z;
  }

  double to_internal(double x) const {
    switch (map) {
      case Map::Identity: return x;
      case Map::Logistic: {
        const double w = b.hi - b.lo;
        const double s = std::clamp((x - b.lo) / w, 1e-9, 1.0 - 1e-9);
        return std::log(s / (1.0 - s));
      }
      case Map::LowerExp: return std::log(std::max(x - b.lo, 1e-300));
      case Map::UpperExp: return std::log(std::max(b.hi - x, 1e-300));
    }
    return x;
  }

  double initial_step(double z) const {
    return map == Map::Identity ? 0.1 * std::max(1.0, std::abs(z)) : 0.5;
  }
};

Coordinate make_coordinate(const Bounds& b) {
  if (!(b.lo < b.hi) && !(b.lo == -kInf && b.hi == kInf)) {
    throw DomainError("optimizer: empty parameter interval");
  }
  const bool lo = std::isfinite(b.lo), hi = std::isfinite(b.hi);
  if (lo && hi) return {Map::Logistic, b};
  if (lo) return {Map::LowerExp, b};
  if (hi) return {Map::UpperExp, b};
  return {Map::Identity, b};
}

struct SearchResult {
  std::vector<double> z;
  double value = kInf;
  bool tolerance_reached = false;
};

class Search {
 public:
  Search(const Objective& f, std::span<const Coordinate> coords, const OptimizerOptions& opt,
         std::size_t& evaluations)
      : f_(f), coords_(coords), opt_(opt), evals_(evaluations), x_(coords.size()) {}

  double eval(const std::vector<double>& z) {
    ++evals_;
    ++local_evals_;
    for (std::size_t i = 0; i < z.size(); ++i) x_[i] = coords_[i].to_external(z[i]);
    const double v = f_(x_);
    return std::isfinite(v) ? v : kInf;
  }

  SearchResult run(std::vector<double> z0) {
    const std::size_t d = z0.size();
    std::vector<std::vector<double>> pts(d + 1, z0);
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += coords_[i].initial_step(z0[i]);
    for (std::size_t j = 0; j <= d; ++j) fv[j] = eval(pts[j]);

    std::vector<std::size_t> order(d + 1);
    std::vector<double> centroid(d), trial(d), trial2(d);
    bool done = false;
    while (local_evals_ < static_cast<std::size_t>(opt_.max_evaluations)) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      const std::size_t best = order[0], worst = order[d], second = order[d - 1];

      double spread = 0.0, scale = 1.0;
      for (std::size_t i = 0; i < d; ++i) scale = std::max(scale, std::abs(pts[best][i]));
      for (std::size_t j = 0; j <= d; ++j) {
        for (std::size_t i = 0; i < d; ++i) {
          spread = std::max(spread, std::abs(pts[j][i] - pts[best][i]));
        }
      }
      if (std::isfinite(fv[best]) && spread <= opt_.rel_tol * scale) {
        done = true;
        break;
      }

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t j = 0; j <= d; ++j) {
        if (j == worst) continue;
        for (std::size_t i = 0; i < d; ++i) centroid[i] += pts[j][i] / static_cast<double>(d);
      }
      auto along = [&](double t, std::vector<double>& out) {
        for (std::size_t i = 0; i < d; ++i) out[i] = centroid[i] + t * (pts[worst][i] - centroid[i]);
      };

      along(-1.0, trial);
      const double fr = eval(trial);
      if (fr < fv[best]) {
        along(-2.0, trial2);
        const double fe = eval(trial2);
        if (fe < fr) {
          pts[worst] = trial2;
          fv[worst] = fe;
        } else {
          pts[worst] = trial;
          fv[worst] = fr;
        }
        continue;
      }
      if (fr < fv[second]) {
        pts[worst] = trial;
        fv[worst] = fr;
        continue;
      }
      const bool outside = fr < fv[worst];
      along(outside ? -0.5 : 0.5, trial2);
      const double fc = eval(trial2);
      if (fc < (outside ? fr : fv[worst])) {
        pts[worst] = trial2;
        fv[worst] = fc;
        continue;
      }
      for (std::size_t j = 0; j <= d; ++j) {
        if (j == best) continue;
        for (std::size_t i = 0; i < d; ++i) pts[j][i] = pts[best][i] + 0.5 * (pts[j][i] - pts[best][i]);
        fv[j] = eval(pts[j]);
      }
    }
    const auto it = std::min_element(fv.begin(), fv.end());
    return {pts[static_cast<std::size_t>(it - fv.begin())], *it, done};
  }

 private:
  const Objective& f_;
  std::span<const Coordinate> coords_;
  const OptimizerOptions& opt_;
  std::size_t& evals_;
  std::size_t local_evals_ = 0;
  std::vector<double> x_;
};

}  // namespace

OptimizeResult minimize_bounded(const Objective& f, std::span<const double> start,
                                std::span<const Bounds> bounds, const OptimizerOptions& options) {
  if (start.size() != bounds.size() || start.empty()) {
    throw DomainError("optimizer: start and bounds must have equal, non-zero length");
  }
  if (options.restarts < 1) throw DomainError("optimizer: restarts must be >= 1");
  std::vector<Coordinate> coords;
  for (const auto& b : bounds) coords.push_back(make_coordinate(b));
  const std::size_t d = start.size();
  std::vector<double> z0(d);
  for (std::size_t i = 0; i < d; ++i) z0[i] = coords[i].to_internal(start[i]);

  OptimizeResult out;
  std::vector<SearchResult> results;
  // Fixed perturbation stream: restarts are part of the algorithm, not of the
  // caller's randomness.
  Rng rng(0x6d61645f6669747ULL);
  for (int r = 0; r < options.restarts; ++r) {
    std::vector<double> z = z0;
    if (r > 0) {
      for (std::size_t i = 0; i < d; ++i) {
        z[i] += (rng.uniform() - 0.5) * 2.0 * coords[i].initial_step(z0[i]) * 2.0;
      }
    }
    Search search(f, coords, options, out.evaluations);
    auto res = search.run(std::move(z));
    // One polishing pass from the best vertex refreshes a degenerate simplex.
    if (std::isfinite(res.value)) {
      Search polish(f, coords, options, out.evaluations);
      auto again = polish.run(res.z);
      if (again.value <= res.value) res = std::move(again);
    }
    results.push_back(std::move(res));
  }

  std::vector<std::size_t> idx(results.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return results[a].value < results[b].value; });
  for (const auto& r : results) out.successful_restarts += std::isfinite(r.value) ? 1 : 0;

  const auto& best = results[idx[0]];
  out.value = best.value;
  out.x.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.x[i] = coords[i].to_external(best.z[i]);
  if (!std::isfinite(best.value)) return out;

  if (results.size() == 1) {
    out.converged = best.tolerance_reached;
    return out;
  }
  const auto& runner = results[idx[1]];
  if (!std::isfinite(runner.value)) return out;
  bool agree = true;
  for (std::size_t i = 0; i < d; ++i) {
    const double a = out.x[i], b = coords[i].to_external(runner.z[i]);
    agree = agree && std::abs(a - b) <= options.agreement_tol * std::max(1.0, std::abs(a));
  }
  out.converged = agree && best.tolerance_reached;
  return out;
}

}  // namespace losstail
