#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "partest/hhg.h"
#include "partest/independence.h"
#include "partest/ksample.h"
#include "partest/rng.h"

namespace {

std::vector<int> shuffled_labels(int n, std::uint64_t seed) {
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i < n / 2 ? 0 : 1;
  partest::Rng rng(seed);
  rng.shuffle(std::span<int>(labels));
  return labels;
}

std::vector<int> shuffled_ranks(int n, std::uint64_t seed) {
  std::vector<int> ranks(n);
  std::iota(ranks.begin(), ranks.end(), 1);
  partest::Rng rng(seed);
  rng.shuffle(std::span<int>(ranks));
  return ranks;
}

void BM_KSampleSum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  partest::KSampleEngine engine({n / 2, n - n / 2}, partest::ScoreKind::kLikelihoodRatio, n / 2);
  const auto labels = shuffled_labels(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(engine.sum_all_m(labels));
  state.SetComplexityN(n);
}
BENCHMARK(BM_KSampleSum)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_KSampleMax(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  partest::KSampleEngine engine({n / 2, n - n / 2}, partest::ScoreKind::kLikelihoodRatio, n / 2);
  const auto labels = shuffled_labels(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(engine.max_all_m(labels));
  state.SetComplexityN(n);
}
BENCHMARK(BM_KSampleMax)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNCubed);

void BM_AdpSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  partest::IndependenceEngine engine(n, partest::ScoreKind::kLikelihoodRatio, 2);
  const auto order = shuffled_ranks(n, 7);
  for (auto _ : state) {
    engine.sweep_adp(order);
    benchmark::DoNotOptimize(engine.adp_statistic(2));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_AdpSweep)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_DdpSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  partest::IndependenceEngine engine(n, partest::ScoreKind::kLikelihoodRatio, 2);
  const auto order = shuffled_ranks(n, 11);
  for (auto _ : state) {
    engine.sweep_ddp(order);
    benchmark::DoNotOptimize(engine.ddp_statistic(2));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_DdpSweep)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_Hhg(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  partest::Rng rng(13);
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = x[i] + rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(partest::hhg_univariate(x, y));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Hhg)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

}  // namespace

BENCHMARK_MAIN();
