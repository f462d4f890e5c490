#include <benchmark/benchmark.h>

#include <omp.h>

#include "spinsim/estimator.hpp"

namespace {

using namespace spinsim;

constexpr std::uint64_t kRounds = 100'000;

void BM_CorrelationSerial(benchmark::State& state) {
  const SpinParameters params(static_cast<int>(state.range(0)));
  const auto a = UnitVector::ez(), b = UnitVector::in_xz_plane(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::correlation_serial(a, b, params, 1, 0, kRounds));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kRounds));
}

void BM_CorrelationOmp(benchmark::State& state) {
  const SpinParameters params(static_cast<int>(state.range(0)));
  const int shards = static_cast<int>(state.range(1));
  const auto a = UnitVector::ez(), b = UnitVector::in_xz_plane(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::correlation_omp(a, b, params, 1, kRounds, shards));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kRounds));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_MarginalsOmp(benchmark::State& state) {
  const SpinParameters params(static_cast<int>(state.range(0)));
  const auto a = UnitVector::ez(), b = UnitVector::in_xz_plane(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::marginals_omp(a, b, params, 1, kRounds, 8));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kRounds));
}

}  // namespace

BENCHMARK(BM_CorrelationSerial)->Arg(1)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CorrelationOmp)
    ->ArgsProduct({{1, 3, 6}, {1, 4, 16}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_MarginalsOmp)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
