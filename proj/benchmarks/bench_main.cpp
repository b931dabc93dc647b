#include <random>

#include <benchmark/benchmark.h>

#include "lpdo/channel.hpp"
#include "lpdo/measures.hpp"
#include "lpdo/objectives.hpp"
#include "lpdo/prune.hpp"
#include "lpdo/stiefel.hpp"

using namespace lpdo;

namespace {

LpdoChain depolarized(std::size_t n, std::int64_t chi) {
  return depolarize_to_lpmm(build_random_pure(n, chi, 1));
}

void BM_TwoSiteBlock(benchmark::State& state) {
  const auto c = canonicalize(depolarized(12, state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(two_site_block(c, 5));
}
BENCHMARK(BM_TwoSiteBlock)->Arg(4)->Arg(8)->Arg(16);

void BM_TruncateBond(benchmark::State& state) {
  const auto c = canonicalize(depolarized(12, state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(truncate_bond(c, 5, 1e-8));
}
BENCHMARK(BM_TruncateBond)->Arg(4)->Arg(8)->Arg(16);

void BM_Purity(benchmark::State& state) {
  const auto c = depolarized(20, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(purity(c));
}
BENCHMARK(BM_Purity)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  const auto c = depolarized(20, state.range(0));
  SweepOptions opts;
  opts.measure_fidelity = false;
  for (auto _ : state) benchmark::DoNotOptimize(sweep_truncate(c, 1e-8, nullptr, 1, opts));
}
BENCHMARK(BM_Sweep)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state) {
  const auto c = run_truncation_schedule(depolarized(10, 8), 1e-8, 2).chain;
  const auto block = two_site_block(canonicalize(c, 4), 4);
  const auto kind = static_cast<ObjectiveKind>(state.range(0));
  const BlockObjective obj(block, kind);
  std::mt19937_64 rng(3);
  const Matrix v = random_unitary(obj.dim(), rng);
  const bool analytic = state.range(1) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(analytic ? obj.analytic_gradient(v) : obj.gradient(v, 1e-6));
  state.SetLabel(to_string(kind) + (analytic ? " analytic" : " finite-difference"));
}
BENCHMARK(BM_Gradient)
    ->Args({0, 1})
    ->Args({1, 1})
    ->Args({0, 0})
    ->Args({1, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
