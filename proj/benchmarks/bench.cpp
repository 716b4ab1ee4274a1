#include <benchmark/benchmark.h>

#include <random>

#include "rdc/evaluator.hpp"
#include "rdc/solver.hpp"

namespace {

using namespace rdc;

std::vector<double> random_kernel(const CompiledScenario& cs) {
  std::mt19937_64 rng(1);
  std::gamma_distribution<double> g(1.0);
  const std::size_t w = cs.slice_size();
  std::vector<double> k(cs.kernel_size());
  for (std::size_t x = 0; x < cs.sizes().x; ++x) {
    double t = 0;
    for (std::size_t i = 0; i < w; ++i) t += k[x * w + i] = g(rng);
    for (std::size_t i = 0; i < w; ++i) k[x * w + i] /= t;
  }
  return k;
}

void BM_CompiledEvaluate(benchmark::State& state) {
  auto s = dsbs_binary_product(0.2);
  CompiledScenario cs(s, state.range(0));
  auto k = random_kernel(cs);
  for (auto _ : state) benchmark::DoNotOptimize(cs.evaluate(k, {}));
}
BENCHMARK(BM_CompiledEvaluate)->Arg(2)->Arg(7);

void BM_CompiledGradient(benchmark::State& state) {
  auto s = dsbs_binary_product(0.2);
  CompiledScenario cs(s, state.range(0));
  auto k = random_kernel(cs);
  auto dec = cs.bayes_decoder(k);
  CompiledScenario::Gradient g;
  for (auto _ : state) {
    cs.gradient(k, dec, false, g);
    benchmark::DoNotOptimize(g.rate.data());
  }
}
BENCHMARK(BM_CompiledGradient)->Arg(2)->Arg(7);

void BM_TensorEvaluate(benchmark::State& state) {
  auto s = dsbs_binary_product(0.2);
  CompiledScenario cs(s, 7);
  Strategy sigma{7, random_kernel(cs), {}};
  sigma.decoder2 = cs.bayes_decoder(sigma.kernel);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(s, sigma));
}
BENCHMARK(BM_TensorEvaluate);

void BM_Solve(benchmark::State& state) {
  auto s = dsbs_binary_product(0.2);
  SolveConfig cfg;
  cfg.restarts = 2;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve(s, {0.0, 0.15, 0.5}, cfg).rate);
}
BENCHMARK(BM_Solve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
