#include "edgespec/dirac_point.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace edgespec {

namespace {

constexpr cdouble kTau{-0.5, 0.8660254037844386};  // e^{2 pi i / 3}

// Coefficient action of the rotation operator (R f)(x) = f(R^* x) on
// Kstar-pseudo-periodic functions: the coefficient on wave perm[i] is c_i.
Eigen::VectorXcd apply_rotation(const PlaneWaveBasis& basis, const std::vector<int>& perm,
                                const Eigen::VectorXcd& c) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    if (perm[size_t(i)] < 0) throw Error("rotation leaves the wave set; basis not closed");
    out(perm[size_t(i)]) = c(i);
  }
  return out;
}

Eigen::Vector2cd momentum_pairing(const LatticeBasis& lat, const PlaneWaveBasis& basis,
                                  const Eigen::Vector2d& kstar, const Eigen::VectorXcd& u,
                                  const Eigen::VectorXcd& w) {
  // <u, -2i grad w> = sum conj(u_i) * 2 * (kstar + kappa_i) * w_i
  Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
  for (int i = 0; i < basis.dim(); ++i) {
    const Eigen::Vector2d P = kstar + basis.kappa(lat, i);
    const cdouble f = 2.0 * std::conj(u(i)) * w(i);
    acc.x() += f * P.x();
    acc.y() += f * P.y();
  }
  return acc;
}

}  // namespace

DiracPointData detect_dirac_point(const LatticeBasis& lat, const PeriodicScalarField& V,
                                  KPoint kstar, int cutoff, const DiracTolerances& tol) {
  DiracPointData dp;
  dp.kstar = kstar;
  dp.basis = PlaneWaveBasis::dirac_centered(kstar, cutoff);
  const Eigen::Vector2d Ks = dp.kstar_vec(lat);
  const auto perm = dp.basis.rotation_permutation(kstar);

  auto H = assemble_bloch_hamiltonian(lat, Ks, V, std::nullopt, dp.basis);
  const int nb = std::min(tol.scan_bands, dp.basis.dim());
  auto es = solve_bloch(H, Ks, nb);

  bool saw_degenerate = false;
  for (int b = 0; b + 1 < nb; ++b) {
    const double E = 0.5 * (es.energies(b) + es.energies(b + 1));
    const double dtol = tol.degeneracy * (1.0 + std::abs(E));
    if (std::abs(es.energies(b + 1) - es.energies(b)) > dtol) continue;
    const bool sep_below = b == 0 || (E - es.energies(b - 1)) > tol.separation_factor * dtol;
    const bool sep_above =
        (b + 2 >= nb) || (es.energies(b + 2) - E) > tol.separation_factor * dtol;
    if (!sep_below || !sep_above) continue;
    saw_degenerate = true;

    // Split the 2D eigenspace across the rotation eigenspaces tau, tau-bar.
    Eigen::MatrixXcd U = es.vectors.middleCols(b, 2);
    Eigen::Matrix2cd M;
    for (int a = 0; a < 2; ++a) {
      const Eigen::VectorXcd Ru = apply_rotation(dp.basis, perm, U.col(a));
      for (int l = 0; l < 2; ++l) M(l, a) = U.col(l).dot(Ru);
    }
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> ms(M);
    int i_tau = -1, i_tau_bar = -1;
    for (int i = 0; i < 2; ++i) {
      if (std::abs(ms.eigenvalues()(i) - kTau) < 1e-6) i_tau = i;
      if (std::abs(ms.eigenvalues()(i) - std::conj(kTau)) < 1e-6) i_tau_bar = i;
    }
    if (i_tau < 0 || i_tau_bar < 0) continue;  // degenerate pair of the wrong type

    dp.E_D = E;
    dp.b_star = b + 1;  // 1-based
    dp.Phi1 = (U * ms.eigenvectors().col(i_tau)).normalized();
    dp.Phi2 = dp.Phi1.conjugate();  // P C acts as plain coefficient conjugation

    // Phase normalization: upsilon(theta) = e^{2 i theta} upsilon, fixed so
    // that upsilon is real with upsilon > 0 at K and < 0 at K'.
    const Eigen::Vector2cd w = momentum_pairing(lat, dp.basis, Ks, dp.Phi1, dp.Phi2);
    const cdouble ups_raw = 0.5 * (std::conj(w.x()) + cdouble(0.0, 1.0) * std::conj(w.y()));
    if (std::abs(ups_raw) < tol.velocity_min)
      throw VelocityZero("detect_dirac_point: |upsilon| below threshold");
    const double sign = (kstar == KPoint::K) ? 1.0 : -1.0;
    const cdouble e2it = sign * std::abs(ups_raw) / ups_raw;
    const cdouble eit = std::sqrt(e2it);
    dp.Phi1 *= eit;
    dp.Phi2 = dp.Phi1.conjugate();
    const Eigen::Vector2cd w2 = momentum_pairing(lat, dp.basis, Ks, dp.Phi1, dp.Phi2);
    const cdouble ups = 0.5 * (std::conj(w2.x()) + cdouble(0.0, 1.0) * std::conj(w2.y()));
    dp.upsilon = ups.real();
    dp.upsilon_imag_residual = std::abs(ups.imag());

    double below = b > 0 ? E - es.energies(b - 1) : std::numeric_limits<double>::infinity();
    double above =
        b + 2 < nb ? es.energies(b + 2) - E : std::numeric_limits<double>::infinity();
    dp.gap_estimate = std::min(below, above);

    // Radial conical fit: |E_pm(Kstar + rho d) - E_D| ~ upsilon_D * rho.
    double num = 0.0, den = 0.0;
    for (int id = 0; id < tol.fit_directions; ++id) {
      const double ang = 2.0 * M_PI * double(id) / tol.fit_directions;
      const Eigen::Vector2d dir(std::cos(ang), std::sin(ang));
      for (int ir = 0; ir < tol.fit_radii; ++ir) {
        const double t = tol.fit_radii == 1
                             ? 0.0
                             : double(ir) / double(tol.fit_radii - 1);
        const double rho = tol.fit_r_min * std::pow(tol.fit_r_max / tol.fit_r_min, t);
        const Eigen::Vector2d k = Ks + rho * dir;
        auto Hk = assemble_bloch_hamiltonian(lat, k, V, std::nullopt, dp.basis);
        auto ek = solve_bloch(Hk, k, b + 2);
        const double split = 0.5 * (ek.energies(b + 1) - ek.energies(b));
        num += rho * split;
        den += rho * rho;
      }
    }
    dp.upsilon_fit = num / den;
    return dp;
  }

  if (saw_degenerate)
    throw WrongSymmetryType(
        "detect_dirac_point: degenerate pairs found, none split as tau / tau-bar");
  throw NoDoubleEigenvalue("detect_dirac_point: no double eigenvalue within tolerance");
}

ThetaResult compute_theta(const LatticeBasis& lat, const PeriodicScalarField& a,
                          DiracPointData& dp, double threshold) {
  const Eigen::Vector2d Ks = dp.kstar_vec(lat);
  const Eigen::MatrixXcd W = assemble_sigma2_coupling(lat, Ks, a, dp.basis);
  ThetaResult out;
  const Eigen::VectorXcd W1 = W * dp.Phi1;
  const Eigen::VectorXcd W2 = W * dp.Phi2;
  out.Theta(0, 0) = dp.Phi1.dot(W1);
  out.Theta(0, 1) = dp.Phi1.dot(W2);
  out.Theta(1, 0) = dp.Phi2.dot(W1);
  out.Theta(1, 1) = dp.Phi2.dot(W2);
  out.theta = out.Theta(0, 0).real();
  Eigen::Matrix2cd sigma3 = Eigen::Matrix2cd::Zero();
  sigma3(0, 0) = 1.0;
  sigma3(1, 1) = -1.0;
  out.sigma3_residual = (out.Theta - out.theta * sigma3).norm();
  if (std::abs(out.theta) < threshold)
    throw NonDegeneracyFailure("compute_theta: |theta| below threshold, assumption violated");
  dp.theta_coeff = out.theta;
  return out;
}

Eigen::Matrix2cd sigma_matrix(const LatticeBasis& lat, const Eigen::Vector2d& m,
                              const DiracPointData& dp) {
  const Eigen::Vector2d Ks = dp.kstar_vec(lat);
  auto pair = [&](const Eigen::VectorXcd& u, const Eigen::VectorXcd& w) {
    const Eigen::Vector2cd v = momentum_pairing(lat, dp.basis, Ks, u, w);
    return m.x() * v.x() + m.y() * v.y();
  };
  Eigen::Matrix2cd S;
  S(0, 0) = pair(dp.Phi1, dp.Phi1);
  S(0, 1) = pair(dp.Phi1, dp.Phi2);
  S(1, 0) = pair(dp.Phi2, dp.Phi1);
  S(1, 1) = pair(dp.Phi2, dp.Phi2);
  return S;
}

GapSplitting bulk_gap_splitting(const LatticeBasis& lat, const PeriodicScalarField& V,
                                const PeriodicScalarField& a, const DiracPointData& dp,
                                double delta) {
  if (delta < 0.0) throw Error("bulk_gap_splitting: delta must be >= 0");
  DiracPointData tmp = dp;
  const double theta =
      dp.theta_coeff ? *dp.theta_coeff : compute_theta(lat, a, tmp, 1e-14).theta;
  GapSplitting out;
  out.theta_abs = std::abs(theta);
  out.predicted_minus = dp.E_D - delta * out.theta_abs;
  out.predicted_plus = dp.E_D + delta * out.theta_abs;

  const Eigen::Vector2d Ks = dp.kstar_vec(lat);
  BulkPerturbation pert{delta, &a};
  auto H = assemble_bloch_hamiltonian(lat, Ks, V, pert, dp.basis);
  auto es = solve_bloch(H, Ks, std::min(dp.b_star + 4, dp.basis.dim()));
  // the split pair nearest E_D
  double best = std::numeric_limits<double>::infinity();
  int ib = 0;
  for (int b = 0; b + 1 < es.energies.size(); ++b) {
    const double d = std::abs(0.5 * (es.energies(b) + es.energies(b + 1)) - dp.E_D);
    if (d < best) {
      best = d;
      ib = b;
    }
  }
  out.E_minus = es.energies(ib);
  out.E_plus = es.energies(ib + 1);
  return out;
}

}  // namespace edgespec
