#include "doctest.h"
#include "edgespec/dirac_point.hpp"

#include <cmath>

using namespace edgespec;

namespace {
const LatticeBasis lat = LatticeBasis::build();

const PeriodicScalarField& trigV() {
  static PeriodicScalarField V =
      synth_honeycomb_potential(PotentialKind::Trig, 10.0, std::nullopt, lat).field;
  return V;
}

const PeriodicScalarField& trigA() {
  static PeriodicScalarField a =
      synth_honeycomb_potential(PotentialKind::Trig, 0.8, std::nullopt, lat).field;
  return a;
}

DiracPointData& dpK() {
  static DiracPointData dp = [] {
    DiracPointData d = detect_dirac_point(lat, trigV(), KPoint::K, 8);
    compute_theta(lat, trigA(), d);
    return d;
  }();
  return dp;
}

DiracPointData& dpKp() {
  static DiracPointData dp = [] {
    DiracPointData d = detect_dirac_point(lat, trigV(), KPoint::Kp, 8);
    compute_theta(lat, trigA(), d);
    return d;
  }();
  return dp;
}

constexpr cdouble tau{-0.5, 0.8660254037844386};
}  // namespace

TEST_CASE("detection: double eigenvalue, signs, and conical fit") {
  const DiracPointData& dp = dpK();
  CHECK(dp.b_star == 1);
  CHECK(dp.upsilon > 0.0);
  CHECK(dp.upsilon_imag_residual < 1e-10 * std::abs(dp.upsilon));
  // two independent computations of the Dirac velocity agree within 1%
  CHECK(std::abs(dp.upsilon_fit - dp.upsilon) < 0.01 * std::abs(dp.upsilon));
  CHECK(dp.gap_estimate > 10.0 * 1e-8 * (1.0 + std::abs(dp.E_D)));

  const DiracPointData& dq = dpKp();
  CHECK(dq.upsilon < 0.0);
  CHECK(std::abs(dq.upsilon + dp.upsilon) < 1e-8);
  CHECK(std::abs(dq.E_D - dp.E_D) < 1e-10);
}

TEST_CASE("Dirac eigenbasis: rotation eigenspaces and orthonormality") {
  for (const DiracPointData* dp : {&dpK(), &dpKp()}) {
    auto perm = dp->basis.rotation_permutation(dp->kstar);
    Eigen::VectorXcd RPhi1 = Eigen::VectorXcd::Zero(dp->basis.dim());
    Eigen::VectorXcd RPhi2 = Eigen::VectorXcd::Zero(dp->basis.dim());
    for (int i = 0; i < dp->basis.dim(); ++i) {
      RPhi1(perm[size_t(i)]) = dp->Phi1(i);
      RPhi2(perm[size_t(i)]) = dp->Phi2(i);
    }
    CHECK((RPhi1 - tau * dp->Phi1).norm() < 1e-10);
    CHECK((RPhi2 - std::conj(tau) * dp->Phi2).norm() < 1e-10);
    CHECK(std::abs(dp->Phi1.norm() - 1.0) < 1e-12);
    CHECK(std::abs(dp->Phi2.norm() - 1.0) < 1e-12);
    CHECK(std::abs(dp->Phi1.dot(dp->Phi2)) < 1e-10);
    // Phi2 is the P C image of Phi1: plain coefficient conjugation
    CHECK((dp->Phi2 - dp->Phi1.conjugate()).norm() == 0.0);
  }
}

TEST_CASE("Hamiltonian commutes with the rotation representation at Kstar") {
  const DiracPointData& dp = dpK();
  auto H = assemble_bloch_hamiltonian(lat, lat.K, trigV(), std::nullopt, dp.basis);
  auto perm = dp.basis.rotation_permutation(dp.kstar);
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(dp.basis.dim(), dp.basis.dim());
  for (int i = 0; i < dp.basis.dim(); ++i) P(perm[size_t(i)], i) = 1.0;
  CHECK((P * H - H * P).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("theta coupling: sigma_3 structure and K' equality") {
  DiracPointData dp = dpK();
  auto th = compute_theta(lat, trigA(), dp);
  CHECK(std::abs(th.theta) > 1.0);
  CHECK(th.sigma3_residual < 1e-6 * std::abs(th.theta));
  DiracPointData dq = dpKp();
  auto thp = compute_theta(lat, trigA(), dq);
  CHECK(std::abs(thp.theta - th.theta) < 1e-8);

  SUBCASE("constant a gives theta = 0 and NonDegeneracyFailure") {
    PeriodicScalarField aconst;
    aconst.modes.emplace_back(0, 0);
    aconst.coeffs.emplace_back(1.0, 0.0);
    DiracPointData d2 = dpK();
    CHECK_THROWS_AS(compute_theta(lat, aconst, d2), NonDegeneracyFailure);
  }
}

TEST_CASE("sigma matrix equals upsilon (m1 sigma_1 - m2 sigma_2)") {
  const DiracPointData& dp = dpK();
  auto check_m = [&](const Eigen::Vector2d& m) {
    Eigen::Matrix2cd S = sigma_matrix(lat, m, dp);
    Eigen::Matrix2cd target = Eigen::Matrix2cd::Zero();
    target(0, 1) = dp.upsilon * cdouble(m.x(), m.y());
    target(1, 0) = dp.upsilon * cdouble(m.x(), -m.y());
    const double scale = std::abs(dp.upsilon) * m.norm() + 1e-300;
    CHECK((S - target).norm() < 1e-6 * scale);
  };
  check_m(Eigen::Vector2d(1.0, 0.0));
  check_m(Eigen::Vector2d(0.0, 1.0));
  check_m(Eigen::Vector2d(0.37, -1.24));
  // zero direction: zero matrix by linearity
  CHECK(sigma_matrix(lat, Eigen::Vector2d::Zero(), dp).norm() < 1e-12);
}

TEST_CASE("cutoff convergence: E_D and upsilon stable under +2 shells") {
  DiracPointData a = detect_dirac_point(lat, trigV(), KPoint::K, 6);
  DiracPointData b = detect_dirac_point(lat, trigV(), KPoint::K, 8);
  CHECK(std::abs(a.E_D - b.E_D) < 1e-6);
  CHECK(std::abs(std::abs(a.upsilon) - std::abs(b.upsilon)) < 1e-6);
}

TEST_CASE("gap opening: first-order splitting and Richardson order") {
  const DiracPointData& dp = dpK();
  auto g1 = bulk_gap_splitting(lat, trigV(), trigA(), dp, 0.1);
  auto g2 = bulk_gap_splitting(lat, trigV(), trigA(), dp, 0.05);
  auto g0 = bulk_gap_splitting(lat, trigV(), trigA(), dp, 0.0);
  CHECK(std::abs(g0.E_minus - dp.E_D) < 1e-8);
  CHECK(std::abs(g0.E_plus - dp.E_D) < 1e-8);
  const double err1 = std::max(std::abs(g1.E_minus - g1.predicted_minus),
                               std::abs(g1.E_plus - g1.predicted_plus));
  const double err2 = std::max(std::abs(g2.E_minus - g2.predicted_minus),
                               std::abs(g2.E_plus - g2.predicted_plus));
  CHECK(err1 < 1.0);  // O(delta^2) scale with C = O(10)
  const double ratio = err1 / err2;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("gap opening is conjugation-breaking: a C-preserving metric term does not split") {
  // replace a sigma_2 by the real symmetric, C- and R-preserving choice
  // a(x) Id: the first-order 2x2 matrix <Phi_j, grad.(a grad Phi_l)> is then
  // a multiple of the identity, so the first-order splitting coefficient is
  // 0, versus |theta| for the sigma_2 coupling
  const DiracPointData& dp = dpK();
  const Eigen::Vector2d Ks = lat.K;
  Eigen::Matrix2cd M = Eigen::Matrix2cd::Zero();
  const PeriodicScalarField& a = trigA();
  auto pair_sym = [&](const Eigen::VectorXcd& u, const Eigen::VectorXcd& w) {
    cdouble acc{0.0, 0.0};  // -<grad u, a grad w>
    for (size_t m = 0; m < a.modes.size(); ++m) {
      const Eigen::Vector2i d = a.modes[m];
      for (int i = 0; i < dp.basis.dim(); ++i) {
        const Eigen::Vector2i ni = dp.basis.coords(i);
        const int j = dp.basis.index_of(ni.x() - d.x(), ni.y() - d.y());
        if (j < 0) continue;
        const Eigen::Vector2d Pi = Ks + dp.basis.kappa(lat, i);
        const Eigen::Vector2d Pj = Ks + dp.basis.kappa(lat, j);
        acc += -std::conj(u(i)) * a.coeffs[m] * Pi.dot(Pj) * w(j);
      }
    }
    return acc;
  };
  M(0, 0) = pair_sym(dp.Phi1, dp.Phi1);
  M(0, 1) = pair_sym(dp.Phi1, dp.Phi2);
  M(1, 0) = pair_sym(dp.Phi2, dp.Phi1);
  M(1, 1) = pair_sym(dp.Phi2, dp.Phi2);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(M);
  const double split_sym = es.eigenvalues()(1) - es.eigenvalues()(0);
  const double theta_abs = std::abs(*dpK().theta_coeff);
  CHECK(split_sym < 1e-8 * theta_abs);
}

TEST_CASE("detection error paths") {
  // free operator: the triple degeneracy at K does not split as tau/tau-bar pairs
  PeriodicScalarField zero;
  zero.real_valued = zero.even = zero.r_invariant = true;
  CHECK_THROWS(detect_dirac_point(lat, zero, KPoint::K, 4));
}
