// Serial reference versus OpenMP kernels. Arg 0 selects the backend.

#include "orbitspace/group.hpp"
#include "orbitspace/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace orbitspace;
using kernels::Backend;

namespace {

Backend backend_of(const benchmark::State& state) { return state.range(0) == 0 ? Backend::Serial : Backend::Parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_HaarAverage(benchmark::State& state) {
  const auto nodes = haar_quadrature(GroupModel::z_axis_circle(), static_cast<std::size_t>(state.range(1))).weighted();
  Mat s(3, 3);
  s << 2.0, 0.3, 0.1, 0.3, 1.0, 0.2, 0.1, 0.2, 1.5;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::haar_average(nodes, s, backend_of(state)));
  label(state);
}

kernels::OrbitClouds plane_clouds(std::size_t orbits, std::size_t per_orbit) {
  kernels::OrbitClouds c;
  c.metric = Mat::Identity(2, 2);
  Rng rng(3);
  for (std::size_t i = 0; i < orbits; ++i) {
    const double r = rng.uniform(0.2, 1.5);
    Mat cloud(2, static_cast<Eigen::Index>(per_orbit));
    for (std::size_t k = 0; k < per_orbit; ++k) {
      const double a = kTwoPi * static_cast<double>(k) / static_cast<double>(per_orbit);
      cloud.col(static_cast<Eigen::Index>(k)) << r * std::cos(a), r * std::sin(a);
    }
    c.clouds.push_back(std::move(cloud));
  }
  return c;
}

void BM_SetDistanceMatrix(benchmark::State& state) {
  const auto clouds = plane_clouds(static_cast<std::size_t>(state.range(1)), 90);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::set_distance_matrix(clouds, backend_of(state)));
  label(state);
}

void BM_ShortestPathClosure(benchmark::State& state) {
  const auto n = state.range(1);
  Rng rng(5);
  Mat w(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) w(i, j) = w(j, i) = i == j ? 0.0 : rng.uniform(0.1, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::shortest_path_closure(w, backend_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_HaarAverage)->ArgsProduct({{0, 1}, {360, 3600}});
BENCHMARK(BM_SetDistanceMatrix)->ArgsProduct({{0, 1}, {40, 120}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShortestPathClosure)->ArgsProduct({{0, 1}, {200, 600}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
