// Serial vs parallel kernel comparison: nearest neighbors, Chamfer distance,
// and primitive partitioning.
#include <benchmark/benchmark.h>

#include "spa/kernels.hpp"

#include <random>

using namespace spa;

namespace {

std::vector<Vec3> random_points(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Vec3> out(n);
  for (auto& p : out) p = {g(rng), g(rng), g(rng)};
  return out;
}

std::vector<std::pair<Superquadric, Pose>> random_prims(int m, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<std::pair<Superquadric, Pose>> prims(m);
  for (auto& [p, T] : prims) {
    p.alpha = {0.3 + std::abs(g(rng)), 0.3 + std::abs(g(rng)),
               0.3 + std::abs(g(rng))};
    p.eps1 = 0.6;
    p.eps2 = 1.1;
    T.q = {1.0 + 0.1 * g(rng), 0.1 * g(rng), 0.1 * g(rng), 0.1 * g(rng)};
    T.t = {g(rng), g(rng), g(rng)};
  }
  return prims;
}

void bm_nearest_serial(benchmark::State& state) {
  const auto A = random_points((int)state.range(0), 1);
  const auto B = random_points((int)state.range(0), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(nearest_indices_serial(A, B));
}

void bm_nearest_parallel(benchmark::State& state) {
  const auto A = random_points((int)state.range(0), 1);
  const auto B = random_points((int)state.range(0), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(nearest_indices(A, B));
}

void bm_chamfer_serial(benchmark::State& state) {
  PointCloud X, Y;
  X.points = random_points((int)state.range(0), 3);
  Y.points = random_points((int)state.range(0), 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(chamfer_serial(X, Y));
}

void bm_chamfer_parallel(benchmark::State& state) {
  PointCloud X, Y;
  X.points = random_points((int)state.range(0), 3);
  Y.points = random_points((int)state.range(0), 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(chamfer(X, Y));
}

void bm_partition_serial(benchmark::State& state) {
  const auto P = random_points((int)state.range(0), 5);
  const auto prims = random_prims(8, 6);
  for (auto _ : state)
    benchmark::DoNotOptimize(nearest_primitive_serial(P, prims));
}

void bm_partition_parallel(benchmark::State& state) {
  const auto P = random_points((int)state.range(0), 5);
  const auto prims = random_prims(8, 6);
  for (auto _ : state)
    benchmark::DoNotOptimize(nearest_primitive(P, prims));
}

} // namespace

BENCHMARK(bm_nearest_serial)->Arg(512)->Arg(2048)->Arg(8192);
BENCHMARK(bm_nearest_parallel)->Arg(512)->Arg(2048)->Arg(8192);
BENCHMARK(bm_chamfer_serial)->Arg(512)->Arg(2048)->Arg(8192);
BENCHMARK(bm_chamfer_parallel)->Arg(512)->Arg(2048)->Arg(8192);
BENCHMARK(bm_partition_serial)->Arg(2048)->Arg(16384);
BENCHMARK(bm_partition_parallel)->Arg(2048)->Arg(16384);

BENCHMARK_MAIN();
