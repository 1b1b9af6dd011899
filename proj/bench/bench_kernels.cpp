// Serial reference versus OpenMP kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "rbessel/estimation.hpp"
#include "rbessel/experiment.hpp"
#include "rbessel/fbm.hpp"

using namespace rbessel;

namespace {

experiment::ExperimentConfig cell_config(std::size_t n) {
  experiment::ExperimentConfig c;
  c.model.x0 = 3.0;
  c.replications = 64;
  c.cells = {{n, 1.0, experiment::Estimator::Hurst, {}}};
  return c;
}

void BM_cell_serial(benchmark::State& state) {
  const auto cfg = cell_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(experiment::run_cell_serial(cfg, 0));
}

void BM_cell_parallel(benchmark::State& state) {
  const auto cfg = cell_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(experiment::run_cell(cfg, 0));
}

std::vector<double> fbm_values(std::size_t n) { return fbm::sample_fbm(n, 1.0, fbm::HurstIndex(0.3), 1).values; }

void BM_v12_serial(benchmark::State& state) {
  const auto v = fbm_values(static_cast<std::size_t>(state.range(0)));
  const est::ObservedPath p(v, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(est::v12(p));
}

void BM_v12_parallel(benchmark::State& state) {
  const auto v = fbm_values(static_cast<std::size_t>(state.range(0)));
  const est::ObservedPath p(v, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(est::v12_parallel(p));
}

void BM_v22_serial(benchmark::State& state) {
  const auto v = fbm_values(static_cast<std::size_t>(state.range(0)));
  const est::ObservedPath p(v, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(est::v22(p));
}

void BM_v22_parallel(benchmark::State& state) {
  const auto v = fbm_values(static_cast<std::size_t>(state.range(0)));
  const est::ObservedPath p(v, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(est::v22_parallel(p));
}

void BM_fgn(benchmark::State& state, fbm::FgnMethod method) {
  const fbm::FgnSampler sampler(static_cast<std::size_t>(state.range(0)), fbm::HurstIndex(0.3), method);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(seed++));
}

}  // namespace

BENCHMARK(BM_cell_serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cell_parallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_v12_serial)->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(BM_v12_parallel)->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(BM_v22_serial)->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(BM_v22_parallel)->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK_CAPTURE(BM_fgn, circulant, fbm::FgnMethod::CirculantEmbedding)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK_CAPTURE(BM_fgn, hosking, fbm::FgnMethod::Hosking)->Arg(1 << 10)->Arg(1 << 14);

BENCHMARK_MAIN();
