#include <cmath>

#include "losstail/gof.hpp"
#include "losstail/random.hpp"

namespace losstail::serial {

// Written against the public building blocks (sample, run_lengths) rather
// than the replicate kernel, so it checks the parallel decomposition.
std::vector<std::size_t> simulate_null_run_statistics(std::size_t k, double sigma, double alpha,
                                                      std::size_t reps, std::uint64_t seed) {
  const auto pareto = DistributionSpec::pareto(alpha, sigma);
  std::vector<std::size_t> out(reps);
  std::vector<double> edf(k), model(k);
  for (std::size_t i = 0; i < k; ++i) edf[i] = edf_position(i + 1, k);
  for (std::size_t r = 0; r < reps; ++r) {
    const OrderedSample tail = sample(pareto, k, substream(seed, r));
    double log_sum = 0.0;
    for (double t : tail.values()) log_sum += std::log(t / sigma);
    const double a = 1.0 / (log_sum / static_cast<double>(k));
    for (std::size_t i = 0; i < k; ++i) model[i] = -std::expm1(-a * std::log(tail[i] / sigma));
    out[r] = run_lengths(edf, model).m;
  }
  return out;
}

}  // namespace losstail::serial
