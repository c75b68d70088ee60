#include <benchmark/benchmark.h>

#include "wienerlab/clark_ocone.hpp"
#include "wienerlab/harness/instances.hpp"

namespace {

using namespace wienerlab;

void BM_HermiteProduct(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  harness::Rng rng(42);
  const harness::PolyShape shape{n, 4, 8, kDefaultDegreeCap};
  const ChaosPoly p = harness::random_poly(rng, shape);
  const ChaosPoly q = harness::random_poly(rng, shape);
  for (auto _ : state) benchmark::DoNotOptimize(hermite_product(p, q));
  state.counters["terms"] = static_cast<double>(p.size() + q.size());
}
BENCHMARK(BM_HermiteProduct)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_Refine(benchmark::State& state) {
  const auto m = static_cast<unsigned>(state.range(0));
  const ChaosPoly p = ChaosPoly::hermite(2, 1, 3) + ChaosPoly::hermite(2, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(refine(p, m));
}
BENCHMARK(BM_Refine)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_ClarkRefined(benchmark::State& state) {
  const auto m = static_cast<unsigned>(state.range(0));
  const VField v(2, {refine(ChaosPoly::hermite(2, 1, 2) * ChaosPoly::coordinate(2, 2), 1)});
  for (auto _ : state) benchmark::DoNotOptimize(refine_and_reconstruct(v, {m}));
}
BENCHMARK(BM_ClarkRefined)->Arg(1)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
