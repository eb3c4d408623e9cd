#include <benchmark/benchmark.h>

#include "edgespec/bloch.hpp"

using namespace edgespec;

static void BM_BlochSolve(benchmark::State& state) {
  const LatticeBasis lat = LatticeBasis::build();
  const auto V = synth_honeycomb_potential(PotentialKind::Trig, 10.0, std::nullopt, lat);
  const PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(int(state.range(0)));
  for (auto _ : state) {
    auto H = assemble_bloch_hamiltonian(lat, lat.K, V.field, std::nullopt, basis);
    auto es = solve_bloch(H, lat.K, 6);
    benchmark::DoNotOptimize(es.energies(0));
  }
}
BENCHMARK(BM_BlochSolve)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
