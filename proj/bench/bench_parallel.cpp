#include <benchmark/benchmark.h>

#include <random>

#include "sree/equilibrium.hpp"

using namespace sree;

namespace {

ExternalityOperator make_op(std::size_t nz) {
  ExternalityKernel ker;
  return ExternalityOperator(ker, SpatialGrid::uniform(nz, false));
}

SpaceTimeField random_field(std::size_t nt, std::size_t nz) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  SpaceTimeField f(nt, nz);
  for (double& v : f.data()) v = u(rng);
  return f;
}

void BM_apply_S_serial(benchmark::State& state) {
  const auto nz = static_cast<std::size_t>(state.range(0));
  const auto op = make_op(nz);
  const SpaceTimeField k = random_field(400, nz);
  for (auto _ : state) benchmark::DoNotOptimize(apply_S_serial(k, op));
}

void BM_apply_S_parallel(benchmark::State& state) {
  const auto nz = static_cast<std::size_t>(state.range(0));
  const auto op = make_op(nz);
  const SpaceTimeField k = random_field(400, nz);
  for (auto _ : state) benchmark::DoNotOptimize(apply_S(k, op));
}

Economy bench_economy() {
  ModelPrimitives prim;
  ExternalityKernel ker;
  const SpatialGrid g = SpatialGrid::uniform(16, false);
  std::vector<double> k0(16);
  for (std::size_t j = 0; j < 16; ++j) k0[j] = 3.0 + 3.0 * g.locations[j];
  return Economy{prim, ExternalityOperator(ker, g), TimeGrid::uniform(640.0, 400), k0, {}, false, {}};
}

void BM_best_response(benchmark::State& state, Exec exec) {
  const Economy eco = bench_economy();
  const SpaceTimeField K = initial_iterate(eco);
  for (auto _ : state) benchmark::DoNotOptimize(best_response(K, eco, exec));
}

}  // namespace

BENCHMARK(BM_apply_S_serial)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_apply_S_parallel)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_best_response, serial, Exec::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_best_response, parallel, Exec::parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
