#include <benchmark/benchmark.h>

#include "edgespec/lattice.hpp"

using namespace edgespec;

static void BM_WrapData(benchmark::State& state) {
  const LatticeBasis lat = LatticeBasis::build();
  const EdgeFrame frame = EdgeFrame::build(lat, std::sqrt(2.0));
  long m = 0;
  for (auto _ : state) {
    WrapData w = wrap_data(frame, WrapIndex{KPoint::K, m++ % 1000});
    benchmark::DoNotOptimize(w.gamma);
  }
}
BENCHMARK(BM_WrapData);

static void BM_EnumerateLeps(benchmark::State& state) {
  const LatticeBasis lat = LatticeBasis::build();
  const EdgeFrame frame = EdgeFrame::build(lat, std::sqrt(2.0));
  for (auto _ : state) {
    auto L = enumerate_L_eps(frame, 0.01, state.range(0));
    benchmark::DoNotOptimize(L.size());
  }
}
BENCHMARK(BM_EnumerateLeps)->Arg(100)->Arg(1000);
