// Serial reference vs OpenMP kernels. Run with --benchmark_filter=... as usual.

#include <benchmark/benchmark.h>

#include <vector>

#include "attractors/dynsys.hpp"
#include "attractors/lyapunov.hpp"
#include "attractors/nca.hpp"
#include "attractors/reduce.hpp"
#include "attractors/rng.hpp"
#include "attractors/spectral.hpp"

using namespace attractors;

namespace {

nca::Substrate living_grid(int n) {
  nca::Substrate s(n, n);
  Rng rng(1);
  for (auto& v : s.data) v = rng.uniform();
  return s;
}

void BM_NcaStepSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto w = nca::RuleWeights::random(3, 0.05);
  const auto s = living_grid(n);
  std::vector<double> out(s.data.size());
  for (auto _ : state) {
    nca::step_into_serial(s.data, out, s.shape(), w);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_NcaStepParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto w = nca::RuleWeights::random(3, 0.05);
  const auto s = living_grid(n);
  std::vector<double> out(s.data.size());
  for (auto _ : state) {
    nca::step_into(s.data, out, s.shape(), w);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

std::vector<double> random_matrix(std::size_t rows, std::size_t cols) {
  Rng rng(2);
  std::vector<double> a(rows * cols);
  for (auto& v : a) v = rng.gaussian();
  return a;
}

void BM_GramSerial(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 25600;
  const auto a = random_matrix(rows, cols);
  for (auto _ : state) benchmark::DoNotOptimize(reduce::gram_matrix_serial(a, rows, cols));
}

void BM_GramParallel(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 25600;
  const auto a = random_matrix(rows, cols);
  for (auto _ : state) benchmark::DoNotOptimize(reduce::gram_matrix(a, rows, cols));
}

void BM_PowerSpectrum(benchmark::State& state) {
  const auto sys = make_oracle("lorenz");
  const auto traj = evolve(*sys, StateVector{1, 1, 1}, state.range(0) - 1, 1);
  spectral::SpectrumOptions o;
  o.parallel = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(spectral::power_spectrum(traj, o));
}

void BM_LyapunovNca(benchmark::State& state) {
  const auto sys = nca::as_system(nca::RuleWeights::random(3, 0.05), 32, 32);
  const auto x = living_grid(32).data;
  lyapunov::Options o;
  o.n_steps = 10;
  o.warmup = 0;
  o.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov::spectrum(*sys, x, 8, o));
}

}  // namespace

BENCHMARK(BM_NcaStepSerial)->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_NcaStepParallel)->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_GramSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PowerSpectrum)->Args({8192, 0})->Args({8192, 1})->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_LyapunovNca)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
