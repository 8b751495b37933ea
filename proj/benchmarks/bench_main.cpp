#include <benchmark/benchmark.h>

#include "ouedge/cumulants.hpp"
#include "ouedge/edgeworth.hpp"
#include "ouedge/harness.hpp"
#include "ouedge/levy_sim.hpp"
#include "ouedge/statistics.hpp"

using namespace ouedge;

namespace {

const ModelParams kParams(1.0, 0.0, 1.0, 0.5);

CumulantVector gamma_kappaF(int r) {
  return stationary_cumulants(driver_cumulants(CompoundPoissonExpDriver{1.0, 1.0, 1.0}, r), 1.0);
}

void BM_Chi(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  const auto kf = gamma_kappaF(r);
  double T = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chi(r, kParams, kf, T));
    T += 1e-9;
  }
}
BENCHMARK(BM_Chi)->Arg(2)->Arg(6)->Arg(12);

void BM_ExpansionCoefficients(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto table = chi_table(p, kParams, gamma_kappaF(p), 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(expansion_coefficients(p, table));
}
BENCHMARK(BM_ExpansionCoefficients)->DenseRange(3, 12, 3);

void BM_PsiIndicator(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto ec = expansion_coefficients(p, chi_table(p, kParams, gamma_kappaF(p), 10.0));
  double a = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi_indicator(a, ec));
    a += 1e-9;
  }
}
BENCHMARK(BM_PsiIndicator)->Arg(3)->Arg(6)->Arg(12);

void BM_PsiExpectTabulated(benchmark::State& state) {
  const auto ec = expansion_coefficients(4, chi_table(4, kParams, gamma_kappaF(4), 10.0));
  const Tabulated f{{-2.0, 0.0, 1.0, 3.0}, {0.0, 1.0, 0.5, 2.0}};
  for (auto _ : state) benchmark::DoNotOptimize(psi_expect(f, ec));
}
BENCHMARK(BM_PsiExpectTabulated);

void BM_SampleHT(benchmark::State& state) {
  const double T = static_cast<double>(state.range(0));
  const HTSampler sampler(kParams, CompoundPoissonExpDriver{1.0, 1.0, 1.0}, T);
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(1, i++);
    benchmark::DoNotOptimize(sampler(rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleHT)->Arg(5)->Arg(20)->Arg(100);

void BM_SamplePath(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  const DriverSpec d = MixedDriver{0.0, 1.0, 1.0, 1.0};
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(2, i++);
    benchmark::DoNotOptimize(sample_path(kParams, d, 10.0, steps, rng));
  }
}
BENCHMARK(BM_SamplePath)->Arg(100)->Arg(1000);

void BM_KStatisticsBootstrap(benchmark::State& state) {
  const auto samples = sample_normalized(kParams, CompoundPoissonExpDriver{1.0, 1.0, 1.0}, 10.0,
                                         static_cast<std::size_t>(state.range(0)), 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(k_statistics(samples, 4, 50, 7, 1));
}
BENCHMARK(BM_KStatisticsBootstrap)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RunValidationSmall(benchmark::State& state) {
  const ExperimentConfig cfg{.params = kParams,
                             .driver = CompoundPoissonExpDriver{1.0, 1.0, 1.0},
                             .T_grid = {5.0, 10.0},
                             .p_orders = {2, 3, 4},
                             .n_samples = 10000,
                             .seed = 1,
                             .test_points = {-1.0, 0.0, 1.0},
                             .workers = 1,
                             .n_boot = 20};
  for (auto _ : state) benchmark::DoNotOptimize(run_validation(cfg));
}
BENCHMARK(BM_RunValidationSmall)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
