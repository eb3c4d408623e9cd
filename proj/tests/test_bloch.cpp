#include "doctest.h"
#include "edgespec/bloch.hpp"
#include "edgespec/parallel.hpp"

#include <cmath>

using namespace edgespec;

namespace {
const LatticeBasis lat = LatticeBasis::build();

PeriodicScalarField trig(double amp) {
  return synth_honeycomb_potential(PotentialKind::Trig, amp, std::nullopt, lat).field;
}

PeriodicScalarField zero_field() {
  PeriodicScalarField f;
  f.real_valued = f.even = f.r_invariant = true;
  return f;
}
}  // namespace

TEST_CASE("free Laplacian: diagonal matrix of |kappa|^2 at k = 0") {
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(3);
  auto H = assemble_bloch_hamiltonian(lat, Eigen::Vector2d::Zero(), zero_field(), std::nullopt,
                                      basis);
  for (int i = 0; i < basis.dim(); ++i)
    for (int j = 0; j < basis.dim(); ++j) {
      if (i == j)
        CHECK(H(i, i).real() == doctest::Approx(basis.kappa(lat, i).squaredNorm()));
      else
        CHECK(std::abs(H(i, j)) == 0.0);
    }
}

TEST_CASE("free dispersion: lowest band is the minimal |k + kappa|^2") {
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(4);
  const Eigen::Vector2d k = 0.3 * lat.k1 + 0.1 * lat.k2;
  auto es = solve_bloch(assemble_bloch_hamiltonian(lat, k, zero_field(), std::nullopt, basis), k, 1);
  double expect = std::numeric_limits<double>::infinity();
  for (int i = 0; i < basis.dim(); ++i)
    expect = std::min(expect, (k + basis.kappa(lat, i)).squaredNorm());
  CHECK(es.energies(0) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("assembly is Hermitian, with and without the sigma_2 term") {
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(5);
  auto V = trig(10.0);
  auto a = trig(0.8);
  auto H0 = assemble_bloch_hamiltonian(lat, lat.K, V, std::nullopt, basis);
  CHECK((H0 - H0.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  BulkPerturbation pert{0.05, &a};
  auto H = assemble_bloch_hamiltonian(lat, lat.K, V, pert, basis);
  CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("perturbed assembly is linear in delta and matches finite differences") {
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(4);
  auto V = trig(10.0);
  auto a = trig(0.8);
  auto H0 = assemble_bloch_hamiltonian(lat, lat.K, V, std::nullopt, basis);
  const double delta = 0.05;
  BulkPerturbation pert{delta, &a};
  auto H = assemble_bloch_hamiltonian(lat, lat.K, V, pert, basis);
  // finite-difference derivative in delta (exact: H is affine in delta)
  auto W = assemble_sigma2_coupling(lat, lat.K, a, basis);
  CHECK(((H - H0) / delta - W).cwiseAbs().maxCoeff() < 1e-8);
  // skew contribution: off-diagonal entries are purely imaginary multiples
  CHECK((W + W.transpose()).cwiseAbs().maxCoeff() < 1e-12);  // W^T = -W entrywise
}

TEST_CASE("dual-lattice periodicity of the band energies") {
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(8);
  auto V = trig(10.0);
  const Eigen::Vector2d k = 0.21 * lat.k1 - 0.37 * lat.k2;
  const Eigen::Vector2d k2 = k + 2.0 * M_PI * lat.k1;
  auto e1 = solve_bloch(assemble_bloch_hamiltonian(lat, k, V, std::nullopt, basis), k, 4);
  auto e2 = solve_bloch(assemble_bloch_hamiltonian(lat, k2, V, std::nullopt, basis), k2, 4);
  for (int b = 0; b < 4; ++b)
    CHECK(std::abs(e1.energies(b) - e2.energies(b)) < 1e-9);
  CHECK(e1.max_residual < 1e-9);
}

TEST_CASE("even potential: energies at k and -k coincide") {
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(6);
  auto V = trig(10.0);
  const Eigen::Vector2d k = 0.4 * lat.k1 + 0.9 * lat.k2;
  auto ep = solve_bloch(assemble_bloch_hamiltonian(lat, k, V, std::nullopt, basis), k, 5);
  auto em = solve_bloch(assemble_bloch_hamiltonian(lat, -k, V, std::nullopt, basis), -k, 5);
  for (int b = 0; b < 5; ++b)
    CHECK(std::abs(ep.energies(b) - em.energies(b)) < 1e-9);
}

TEST_CASE("two consecutive interior bands degenerate at K") {
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(6);
  auto V = trig(10.0);
  auto es = solve_bloch(assemble_bloch_hamiltonian(lat, lat.K, V, std::nullopt, basis), lat.K, 4);
  CHECK(std::abs(es.energies(1) - es.energies(0)) < 1e-8);  // bands 1, 2 touch at E_D
  CHECK(es.energies(2) - es.energies(1) > 1.0);
}

TEST_CASE("dispersion slice: zigzag slice is 2pi-periodic and matches the point solve") {
  worker_threads() = 1;
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(6);
  auto V = trig(10.0);
  EdgeFrame zz = EdgeFrame::build(lat, 0.0);
  std::vector<double> grid{-M_PI, -1.0, 0.0, 1.0, M_PI - 2.0 * M_PI, 1.0 - 2.0 * M_PI};
  auto slice = dispersion_slice(lat, V, zz, grid, 3, basis);
  // lambda = 0 equals the solve at K itself
  auto at_K = solve_bloch(assemble_bloch_hamiltonian(lat, lat.K, V, std::nullopt, basis), lat.K, 3);
  for (int b = 0; b < 3; ++b)
    CHECK(slice.energies(2, b) == doctest::Approx(at_K.energies(b)).epsilon(1e-12));
  // 2pi-periodicity in lambda (a1 = 1): rows at 1.0 and 1.0 - 2pi agree
  for (int b = 0; b < 3; ++b)
    CHECK(std::abs(slice.energies(3, b) - slice.energies(5, b)) < 1e-9);
}

TEST_CASE("slice bands meet E_D near lambda_I for small gamma_I") {
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(6);
  auto V = trig(10.0);
  auto at_K = solve_bloch(assemble_bloch_hamiltonian(lat, lat.K, V, std::nullopt, basis), lat.K, 2);
  const double E_D = 0.5 * (at_K.energies(0) + at_K.energies(1));
  EdgeFrame f = EdgeFrame::build(lat, std::sqrt(2.0));
  // pick the index with the smallest nonzero |gamma| below 0.05 within |m| <= 40
  auto L = enumerate_L_eps(f, 0.05, 40);
  const WrapData* best = nullptr;
  for (const auto& w : L)
    if (std::abs(w.gamma) > 1e-6 && (!best || std::abs(w.gamma) < std::abs(best->gamma)))
      best = &w;
  REQUIRE(best != nullptr);
  const Eigen::Vector2d k = lat.reduce_dual(lat.K + best->lambda * f.khat2);
  auto es = solve_bloch(assemble_bloch_hamiltonian(lat, k, V, std::nullopt, basis), k, 2);
  const double approach = std::min(std::abs(es.energies(0) - E_D), std::abs(es.energies(1) - E_D));
  // conical approach: |E - E_D| <= (upsilon_D + slack) * |gamma| |khat1|
  CHECK(approach < 6.0 * std::abs(best->gamma));
}

TEST_CASE("no-fold scan on a coarse grid passes for the deep trig potential") {
  worker_threads() = 1;
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(4);
  auto V = trig(10.0);
  auto at_K = solve_bloch(assemble_bloch_hamiltonian(lat, lat.K, V, std::nullopt, basis), lat.K, 2);
  const double E_D = 0.5 * (at_K.energies(0) + at_K.energies(1));
  NoFoldReport rep = nofold_scan(lat, V, E_D, 1, 60, 0.3, basis);
  CHECK(rep.pass);
  CHECK(rep.min_gap > 0.5);
  CHECK(rep.C0 > rep.min_gap - 1e-12);
  // annulus fit consistent with conical slope upsilon_D ~ 3.8
  CHECK(rep.C1 > 2.0);
  CHECK(rep.C1 < 6.0);
  CHECK(rep.fit_rel_residual < 0.5);
}
