#include <benchmark/benchmark.h>

#include "perfsim/aggregate.hpp"
#include "perfsim/classifier.hpp"
#include "perfsim/dynamics.hpp"
#include "perfsim/risk.hpp"

using namespace perfsim;

namespace {
const CostFunction kUnit = CostFunction::linear(1.0, 1.0);
const BaseDistribution& base() {
  static BaseDistribution b = BaseDistribution::symmetric_gaussian_mixture();
  return b;
}
}  // namespace

static void BM_RespondStandard(benchmark::State& state) {
  auto model = ResponseModel::standard(kUnit);
  Interval clamp = model.extended_support(base().support());
  RandomSource rng(1, 0);
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(respond(model, x, {}, 1.0, clamp));
    x = x < 2.0 ? x + 1e-7 : 0.3;
  }
}
BENCHMARK(BM_RespondStandard);

static void BM_RespondNoisy(benchmark::State& state) {
  auto model = ResponseModel::noisy(0.3, kUnit);
  Interval clamp = model.extended_support(base().support());
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(respond(model, x, {0.1, true}, 1.0, clamp));
    x = x < 2.0 ? x + 1e-7 : 0.3;
  }
}
BENCHMARK(BM_RespondNoisy);

static void BM_SampleMap(benchmark::State& state) {
  auto model = ResponseModel::noisy(0.3, kUnit);
  RandomSource rng(2, 0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_map(model, base(), 1.0, n, rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleMap)->Arg(10000)->Arg(100000);

static void BM_DecoupledPrSweep(benchmark::State& state) {
  auto model = ResponseModel::standard(kUnit);
  auto grid = default_theta_grid();
  RandomSource rng(3, 0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(decoupled_pr_sweep(model, base(), 1.0, grid, n, rng));
  }
}
BENCHMARK(BM_DecoupledPrSweep)->Arg(10000)->Arg(100000);

static void BM_NrDensity(benchmark::State& state) {
  double x = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nr_density(base(), kUnit, 0.3, 1.0, x, 1));
    x = x < 5.0 ? x + 1e-5 : -2.0;
  }
}
BENCHMARK(BM_NrDensity);

static void BM_RrmStep(benchmark::State& state) {
  auto model = ResponseModel::mixture(0.5, ResponseModel::standard(kUnit));
  auto grid = default_theta_grid();
  RandomSource rng(4, 0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rrm_step(model, base(), 0.7, grid, n, rng));
  }
}
BENCHMARK(BM_RrmStep)->Arg(10000)->Arg(100000);

static void BM_PerformativeOptimum(benchmark::State& state) {
  auto model = ResponseModel::noisy(0.3, kUnit);
  auto grid = default_theta_grid();
  RandomSource rng(5, 0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(performative_optimum(model, base(), grid, n, rng));
  }
}
BENCHMARK(BM_PerformativeOptimum)->Arg(10000);

BENCHMARK_MAIN();
