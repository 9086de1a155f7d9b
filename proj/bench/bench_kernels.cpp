#include <benchmark/benchmark.h>

#include "losstail/distribution.hpp"
#include "losstail/estimation.hpp"
#include "losstail/gof.hpp"
#include "losstail/resampling.hpp"

using namespace losstail;

namespace {

void BM_NullRunStatistics(benchmark::State& state) {
  const auto reps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_null_run_statistics(50, 1.0, 1.0, reps, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(reps));
}

void BM_NullRunStatisticsSerial(benchmark::State& state) {
  const auto reps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::simulate_null_run_statistics(50, 1.0, 1.0, reps, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(reps));
}

const OrderedSample& boot_sample() {
  static const OrderedSample s = sample(DistributionSpec::gpd(0.5, 10.0), 500, 3);
  return s;
}

std::vector<double> ml_closure(const OrderedSample& x) {
  OptimizerOptions o;
  o.restarts = 1;
  const auto f = fit_gpd_ml(x, 0.0, o);
  return {f.value("gamma"), f.value("sigma")};
}

BootstrapOptions boot_options(benchmark::State& state) {
  BootstrapOptions o;
  o.replicates = static_cast<std::size_t>(state.range(0));
  return o;
}

void BM_Bootstrap(benchmark::State& state) {
  const auto o = boot_options(state);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_fit(boot_sample(), ml_closure, o));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(o.replicates));
}

void BM_BootstrapSerial(benchmark::State& state) {
  const auto o = boot_options(state);
  for (auto _ : state) benchmark::DoNotOptimize(serial::bootstrap_fit(boot_sample(), ml_closure, o));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(o.replicates));
}

}  // namespace

BENCHMARK(BM_NullRunStatistics)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_NullRunStatisticsSerial)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Bootstrap)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BootstrapSerial)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
