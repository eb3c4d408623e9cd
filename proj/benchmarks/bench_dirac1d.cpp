#include <benchmark/benchmark.h>

#include "edgespec/dirac1d.hpp"

using namespace edgespec;

static void BM_Dirac1dSolve(benchmark::State& state) {
  DiracOperatorSpec spec;
  spec.v = 1.0;
  spec.theta = 1.5;
  spec.khat1 = Eigen::Vector2d(0.5, 0.9);
  spec.khat2 = Eigen::Vector2d(0.5, -0.9);
  spec.mu_hat = 0.2;
  for (auto _ : state) {
    auto sp = solve_dirac_1d(spec, 30.0, int(state.range(0)));
    benchmark::DoNotOptimize(sp.eigenvalues.size());
  }
}
BENCHMARK(BM_Dirac1dSolve)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
