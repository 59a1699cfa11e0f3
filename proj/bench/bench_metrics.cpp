// Serial reference kernels against the OpenMP kernels on the same inputs.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "tmts/metrics.hpp"
#include "tmts/preprocess.hpp"

namespace {

using namespace tmts;

std::vector<Vec3> points(int n, std::uint64_t seed) {
  return sample_surface(normalize(fixtures::torus(40, 20)), static_cast<std::size_t>(n), seed);
}

MeshReal sphere(int level) { return normalize(fixtures::icosphere(level)); }

void BM_ChamferSerial(benchmark::State& state) {
  const auto a = points(static_cast<int>(state.range(0)), 1), b = points(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(serial::chamfer(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}

void BM_ChamferParallel(benchmark::State& state) {
  const auto a = points(static_cast<int>(state.range(0)), 1), b = points(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(chamfer(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}

void BM_NormalConsistencySerial(benchmark::State& state) {
  const auto a = sphere(static_cast<int>(state.range(0)));
  const auto b = normalize(fixtures::torus(30, 15));
  for (auto _ : state) benchmark::DoNotOptimize(serial::normal_consistency(a, b));
}

void BM_NormalConsistencyParallel(benchmark::State& state) {
  const auto a = sphere(static_cast<int>(state.range(0)));
  const auto b = normalize(fixtures::torus(30, 15));
  for (auto _ : state) benchmark::DoNotOptimize(normal_consistency(a, b));
}

void BM_SampleSurfaceSerial(benchmark::State& state) {
  const auto m = sphere(3);
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::sample_surface(m, static_cast<std::size_t>(state.range(0)), 7));
}

void BM_SampleSurfaceParallel(benchmark::State& state) {
  const auto m = sphere(3);
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_surface(m, static_cast<std::size_t>(state.range(0)), 7));
}

BENCHMARK(BM_ChamferSerial)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChamferParallel)->Arg(1000)->Arg(4000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormalConsistencySerial)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormalConsistencyParallel)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleSurfaceSerial)->Arg(8192)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SampleSurfaceParallel)->Arg(8192)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
