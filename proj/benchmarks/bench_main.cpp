#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "byzfuse/dp.hpp"
#include "byzfuse/fusion.hpp"
#include "byzfuse/game.hpp"

namespace {

using namespace byzfuse;

dp::NodeWeights weights(int n) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-6.0, 0.0);
  dp::NodeWeights w;
  for (int i = 0; i < n; ++i) {
    w.log_b.push_back(u(gen));
    w.log_h.push_back(u(gen));
  }
  return w;
}

void BM_SubsetSum(benchmark::State& state) {
  const auto w = weights(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(dp::subset_sum(w, k));
}
BENCHMARK(BM_SubsetSum)->Args({20, 6})->Args({20, 9})->Args({30, 14});

void BM_NaiveSubsetSum(benchmark::State& state) {
  const auto w = weights(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(dp::naive_subset_sum(w, k));
}
BENCHMARK(BM_NaiveSubsetSum)->Args({20, 6})->Args({20, 9});

void BM_MapDecide(benchmark::State& state, ByzantineModel model) {
  const int m = static_cast<int>(state.range(0));
  const MapFusion rule(FusionAssumption{model, 0.1, 0.8}, 20, m);
  std::mt19937_64 gen(2);
  std::vector<std::uint32_t> rows(20);
  for (auto& r : rows) r = static_cast<std::uint32_t>(gen() & ((1U << m) - 1));
  for (auto _ : state) benchmark::DoNotOptimize(rule.decide(rows));
}
BENCHMARK_CAPTURE(BM_MapDecide, independent, ByzantineModel{IndependentAlpha{0.3}})->Arg(4)->Arg(10);
BENCHMARK_CAPTURE(BM_MapDecide, fixed6, ByzantineModel{FixedCount{6}})->Arg(4)->Arg(10);
BENCHMARK_CAPTURE(BM_MapDecide, bounded, ByzantineModel{BoundedBelowHalf{}})->Arg(4);

void BM_PayoffRow(benchmark::State& state) {
  Scenario s;
  s.true_model = FixedCount{6};
  s.fc_model = FixedCount{6};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_payoff_matrix(s, StrategyGrid({0.5}), StrategyGrid(), state.range(0), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PayoffRow)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SolveMixed(benchmark::State& state) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = u(gen);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_mixed(a));
}
BENCHMARK(BM_SolveMixed)->Arg(6)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
