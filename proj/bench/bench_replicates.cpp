// Serial reference vs OpenMP replicate kernel, plus closed form vs joint-table
// oracle for the exact contrast.

#include <benchmark/benchmark.h>

#include "strainmix/exact.hpp"
#include "strainmix/simulate.hpp"

namespace {

void BM_ReplicatesSerial(benchmark::State& state) {
  const auto s = strainmix::fixtures::confounded();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(strainmix::replicate_estimates_serial(s, "hosp", n, 64, 1));
  state.SetItemsProcessed(state.iterations() * 64 * static_cast<std::int64_t>(n));
}

void BM_ReplicatesParallel(benchmark::State& state) {
  const auto s = strainmix::fixtures::confounded();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(strainmix::replicate_estimates_parallel(s, "hosp", n, 64, 1));
  state.SetItemsProcessed(state.iterations() * 64 * static_cast<std::int64_t>(n));
}

void BM_ClosedForm(benchmark::State& state) {
  const auto s = strainmix::fixtures::confounded();
  for (auto _ : state) benchmark::DoNotOptimize(strainmix::standardized_contrast(s, "hosp"));
}

void BM_Oracle(benchmark::State& state) {
  const auto s = strainmix::fixtures::confounded();
  for (auto _ : state) benchmark::DoNotOptimize(strainmix::oracle_contrast(s, "hosp"));
}

}  // namespace

BENCHMARK(BM_ReplicatesSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicatesParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ClosedForm);
BENCHMARK(BM_Oracle);

BENCHMARK_MAIN();
