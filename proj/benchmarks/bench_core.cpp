#include <benchmark/benchmark.h>

#include "deltakit/deltafn.hpp"
#include "deltakit/factor.hpp"
#include "deltakit/sampler.hpp"
#include "deltakit/sweeps.hpp"
#include "deltakit/wforms.hpp"

using namespace deltakit;

static void BM_SpfSieve(benchmark::State& state) {
  for (auto _ : state) {
    auto t = SpfTable::build(static_cast<std::uint64_t>(state.range(0)));
    benchmark::DoNotOptimize(t.primes().size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SpfSieve)->Arg(1 << 20)->Arg(1 << 24)->Unit(benchmark::kMillisecond);

static void BM_DeltaMax(benchmark::State& state) {
  const auto table = SpfTable::build(1 << 20);
  const auto logs = divisor_logs(factorize(static_cast<std::uint64_t>(state.range(0)), table));
  for (auto _ : state) benchmark::DoNotOptimize(delta_max(logs));
}
// 720720 has 240 divisors.
BENCHMARK(BM_DeltaMax)->Arg(720720)->Arg(997);

static void BM_MomentSweep(benchmark::State& state) {
  const auto table = SpfTable::build(1 << 20);
  const auto logs = divisor_logs(factorize(720720, table));
  for (auto _ : state) benchmark::DoNotOptimize(m_q(logs, static_cast<double>(state.range(0))));
}
BENCHMARK(BM_MomentSweep)->Arg(2)->Arg(4);

static void BM_DeltaTable(benchmark::State& state) {
  SweepOptions o;
  o.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    std::uint64_t s = 0;
    delta_table(static_cast<std::uint64_t>(state.range(0)), o,
                [&](std::span<const DeltaRow> rows) { s += rows.size(); });
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DeltaTable)->Args({1'000'000, 1})->Args({1'000'000, 4})->Unit(benchmark::kMillisecond);

static void BM_SamplerDraw(benchmark::State& state) {
  const SampleModel model(static_cast<double>(state.range(0)), WeightFamily(1.0));
  RandomSquarefree s;
  std::uint64_t i = 0;
  for (auto _ : state) {
    SplitMix64 rng = SplitMix64::for_sample(1, i++);
    model.draw(rng, s);
    benchmark::DoNotOptimize(s.primes.data());
  }
}
BENCHMARK(BM_SamplerDraw)->Arg(1'000'000)->Arg(100'000'000);

static void BM_GreedyBasis(benchmark::State& state) {
  std::vector<double> theta = {0.31, 0.77, 1.13, 1.9, 2.6};
  theta.resize(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const Basis b = greedy_basis(theta);
    benchmark::DoNotOptimize(c_k_all(b));
  }
}
BENCHMARK(BM_GreedyBasis)->Arg(3)->Arg(5);
BENCHMARK_MAIN();
