#include <benchmark/benchmark.h>

#include <random>

#include "mmflow/generators.hpp"
#include "mmflow/geodesics.hpp"
#include "mmflow/heatflow.hpp"
#include "mmflow/hopflax.hpp"
#include "mmflow/transport.hpp"

namespace {

using namespace mmflow;

Field random_masses(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Field m(n);
  for (int i = 0; i < n; ++i) m[i] = 0.1 + unit_double(rng);
  return m / m.sum();
}

void BM_SolveW2(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Space space = random_euclidean(n, 2, 1);
  const ProbMeasure mu = ProbMeasure::from_masses(space, random_masses(n, 2));
  const ProbMeasure nu = ProbMeasure::from_masses(space, random_masses(n, 3));
  for (auto _ : state) benchmark::DoNotOptimize(solve_w2(space, mu, nu).w2);
}
BENCHMARK(BM_SolveW2)->Arg(10)->Arg(25)->Arg(50);

void BM_HopfLax(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Space space = random_euclidean(n, 2, 4);
  const Field f = random_masses(n, 5) * n;
  for (auto _ : state) benchmark::DoNotOptimize(hopf_lax(space, f, 0.3).sum());
}
BENCHMARK(BM_HopfLax)->Arg(20)->Arg(100);

void BM_HeatFlow(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Space space = path_grid_1d(n);
  Field rho = Field::Ones(space.size());
  rho[0] = 2.0;
  rho /= rho.dot(space.measure());
  for (auto _ : state) benchmark::DoNotOptimize(run_heat_flow(space, rho, 0.05, 1.0 / 1024).energies.back());
}
BENCHMARK(BM_HeatFlow)->Arg(32)->Arg(128);

void BM_Displacement(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Space space = path_grid_1d(n);
  Field a = Field::Zero(space.size()), b = Field::Zero(space.size());
  a.head(n / 4).setOnes();
  b.tail(n / 3).setOnes();
  const ProbMeasure mu0 = ProbMeasure::from_masses(space, a / a.sum());
  const ProbMeasure mu1 = ProbMeasure::from_masses(space, b / b.sum());
  for (auto _ : state) benchmark::DoNotOptimize(displacement_interpolation(space, mu0, mu1, uniform_times(16)).w2);
}
BENCHMARK(BM_Displacement)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
