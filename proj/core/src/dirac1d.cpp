#include "edgespec/dirac1d.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace edgespec {

DomainWall DomainWall::constant(double value) {
  DomainWall w;
  w.id = "constant(" + std::to_string(value) + ")";
  w.kappa = [value](double) { return value; };
  w.is_wall = false;
  return w;
}

DomainWall DomainWall::bumped(double height, double center, double halfwidth) {
  DomainWall w;
  w.id = "tanh+bump(" + std::to_string(height) + "," + std::to_string(center) + "," +
         std::to_string(halfwidth) + ")";
  w.kappa = [height, center, halfwidth](double z) {
    const double t = (z - center) / halfwidth;
    const double bump = std::abs(t) < 1.0 ? height * std::exp(-1.0 / (1.0 - t * t)) : 0.0;
    return std::tanh(z) + bump;
  };
  return w;
}

namespace {

Eigen::Matrix2cd pauli_combo(double upsilon, const Eigen::Vector2d& m) {
  // upsilon * (m1 sigma_1 - m2 sigma_2) = upsilon * [[0, m1 + i m2], [m1 - i m2, 0]]
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  s(0, 1) = upsilon * cdouble(m.x(), m.y());
  s(1, 0) = upsilon * cdouble(m.x(), -m.y());
  return s;
}

// Real antisymmetric first-derivative matrix on the periodic window [-L, L).
Eigen::MatrixXd derivative_matrix(double L, int n, DzScheme scheme) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  if (scheme == DzScheme::FourierSpectral) {
    // Trefethen's periodic spectral matrix, rescaled from period 2*pi to 2L.
    const double scale = M_PI / L;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        if (j == l) continue;
        const int d = j - l;
        D(j, l) = scale * 0.5 * ((d % 2 == 0) ? 1.0 : -1.0) / std::tan(M_PI * double(d) / n);
      }
  } else {
    const double h = 2.0 * L / n;
    auto wrap = [n](int i) { return (i % n + n) % n; };
    for (int j = 0; j < n; ++j) {
      D(j, wrap(j + 1)) += 8.0 / (12.0 * h);
      D(j, wrap(j - 1)) -= 8.0 / (12.0 * h);
      D(j, wrap(j + 2)) -= 1.0 / (12.0 * h);
      D(j, wrap(j - 2)) += 1.0 / (12.0 * h);
    }
  }
  return D;
}

Eigen::VectorXd window_grid(double L, int n) {
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g(i) = -L + 2.0 * L * double(i) / n;
  return g;
}

struct Dirac0Solve {
  Eigen::VectorXd values;    // all 2n eigenvalues ascending
  Eigen::MatrixXcd vectors;  // columns in the D_0 frame (complex gauge undone)
  Eigen::VectorXd grid;
};

// Solve D_0(mu_hat) = vt sigma_1 D_zeta - u2 sigma_2 + theta kappa sigma_3 on
// the window. The gauge U = diag(1, i) makes the matrix real symmetric:
//   [[theta kappa, vt d - u2], [-vt d - u2, -theta kappa]].
Dirac0Solve solve_dirac0(const DiracOperatorSpec& spec, double L, int n, DzScheme scheme) {
  const double vt = spec.v * spec.khat2.norm();
  const double u2 = spec.v * spec.mu_hat / spec.khat2.norm();
  Dirac0Solve out;
  out.grid = window_grid(L, n);
  const Eigen::MatrixXd d = derivative_matrix(L, n, scheme);
  Eigen::MatrixXd M(2 * n, 2 * n);
  M.topLeftCorner(n, n).setZero();
  M.bottomRightCorner(n, n).setZero();
  for (int i = 0; i < n; ++i) {
    const double tk = spec.theta * spec.wall.kappa(out.grid(i));
    M(i, i) = tk;
    M(n + i, n + i) = -tk;
  }
  M.topRightCorner(n, n) = vt * d - u2 * Eigen::MatrixXd::Identity(n, n);
  M.bottomLeftCorner(n, n) = -vt * d - u2 * Eigen::MatrixXd::Identity(n, n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw Error("solve_dirac0: eigensolver failed");
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors().cast<cdouble>();
  out.vectors.bottomRows(n) *= cdouble(0.0, 1.0);  // undo the gauge
  return out;
}

double boundary_mass(const Eigen::VectorXcd& col, int n) {
  // mass of the spinor in the outer 10% of the window (both components)
  const int edge = std::max(1, n / 10);
  double outer = 0.0, total = 0.0;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < n; ++i) {
      const double w = std::norm(col(c * n + i));
      total += w;
      const bool is_edge = i < edge / 2 || i >= n - (edge - edge / 2);
      if (is_edge) outer += w;
    }
  return outer / total;
}

// Fermion-doubler guard: difference stencils have a spurious symbol zero at
// the Nyquist wavenumber, which binds sawtooth-shaped in-gap states at the
// wall. Sawtooth modes have |v_{i+1} - v_i| ~ 2|v_i|, smooth physical modes
// have increments of order (k h) |v|; the normalized increment energy
// separates them cleanly.
double roughness(const Eigen::VectorXcd& col, int n) {
  double inc = 0.0, total = 0.0;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < n; ++i) {
      const cdouble d = col(c * n + (i + 1) % n) - col(c * n + i);
      inc += std::norm(d);
      total += std::norm(col(c * n + i));
    }
  return inc / total;
}

struct GapFilterResult {
  std::vector<double> z;
  Eigen::MatrixXcd vectors;
};

// The periodic window carries a mirror wall at the wrap whose bound states
// are degenerate with the physical ones; the raw eigenvectors of a
// degenerate cluster come out as arbitrary mixtures with shared boundary
// mass. Rotate each near-degenerate cluster to extremal boundary-mass
// combinations before filtering.
GapFilterResult filter_gap_states(const Dirac0Solve& sol, double theta_gap,
                                  const Dirac1dOptions& opt, int n) {
  std::vector<std::pair<double, int>> cand;
  for (int i = 0; i < sol.values.size(); ++i)
    if (std::abs(sol.values(i)) < theta_gap - opt.gap_margin) cand.emplace_back(sol.values(i), i);

  GapFilterResult out;
  std::vector<Eigen::VectorXcd> kept;
  const double cluster_tol = 1e-7 * std::max(1.0, theta_gap);
  size_t i = 0;
  while (i < cand.size()) {
    size_t j = i + 1;
    while (j < cand.size() && cand[j].first - cand[j - 1].first < cluster_tol) ++j;
    const int k = int(j - i);
    Eigen::MatrixXcd Vc(2 * n, k);
    for (int c = 0; c < k; ++c) Vc.col(c) = sol.vectors.col(cand[i + size_t(c)].second);
    if (k > 1) {
      // Gram matrix of the boundary restriction; eigenvectors give the
      // extremal-boundary-mass rotations within the cluster
      const int edge = std::max(1, n / 10);
      Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(k, k);
      for (int c = 0; c < 2; ++c)
        for (int g = 0; g < n; ++g) {
          const bool is_edge = g < edge / 2 || g >= n - (edge - edge / 2);
          if (!is_edge) continue;
          for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q)
              B(p, q) += std::conj(Vc(c * n + g, p)) * Vc(c * n + g, q);
        }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> bs(B);
      Vc = Vc * bs.eigenvectors();
    }
    for (int c = 0; c < k; ++c) {
      if (boundary_mass(Vc.col(c), n) >= opt.boundary_mass_tol) continue;
      if (roughness(Vc.col(c), n) > 1.0) continue;  // doubler artifact
      out.z.push_back(cand[i].first);
      kept.push_back(Vc.col(c));
    }
    i = j;
  }
  out.vectors.resize(2 * n, long(kept.size()));
  for (size_t c = 0; c < kept.size(); ++c) out.vectors.col(long(c)) = kept[c];
  return out;
}

}  // namespace

DiracOperatorSpec DiracOperatorSpec::build(const DiracPointData& dp, const EdgeFrame& frame,
                                           double mu_hat, DomainWall wall) {
  if (!dp.theta_coeff) throw Error("DiracOperatorSpec: dp.theta_coeff not set; run compute_theta");
  DiracOperatorSpec s;
  s.kstar = dp.kstar;
  s.mu_hat = mu_hat;
  s.wall = std::move(wall);
  s.v = dp.upsilon;
  s.theta = *dp.theta_coeff;
  s.khat1 = frame.khat1;
  s.khat2 = frame.khat2;
  s.sigma_k2 = pauli_combo(s.v, s.khat2);
  s.sigma_k1 = pauli_combo(s.v, s.khat1);
  return s;
}

DiracSpectrum closed_form_spectrum(const std::vector<double>& base_z, double mu_hat, double v,
                                   double theta, double khat2_norm) {
  const double shift = std::abs(v) * mu_hat / khat2_norm;  // upsilon_D mu / |khat2|
  DiracSpectrum out;
  out.theta_gap = std::hypot(theta, shift);
  std::vector<double> pos;
  for (double z : base_z)
    if (z > 1e-12) pos.push_back(z);
  std::sort(pos.begin(), pos.end());
  // protected branch: the zero mode lives in the sigma_2 eigenspace selected
  // by sign(theta), so the crossing slope is -sign(theta) * upsilon_D/|khat2|
  // (verified against the discretized operator and the decoupled ODE)
  out.eigenvalues.push_back(shift * (theta >= 0.0 ? -1.0 : 1.0));
  for (double z : pos) {
    const double zp = std::sqrt(z * z + shift * shift);
    out.eigenvalues.push_back(zp);
    out.eigenvalues.push_back(-zp);
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  out.N = int(pos.size());
  return out;
}

UnitaryEquivalence unitary_equivalence_constants(const Eigen::Vector2d& khat1,
                                                 const Eigen::Vector2d& khat2, double /*v*/) {
  if (khat2.norm() == 0.0) throw Error("unitary_equivalence_constants: khat2 must be nonzero");
  UnitaryEquivalence out;
  out.K_const = khat1.dot(khat2) / khat2.squaredNorm();
  const cdouble z2(khat2.x(), khat2.y());
  out.omega = std::sqrt(std::abs(z2) / z2);
  return out;
}

DiracSpectrum solve_dirac_1d(const DiracOperatorSpec& spec, double L, int N_grid,
                             const Dirac1dOptions& opt) {
  if (N_grid % 2 != 0) throw Error("solve_dirac_1d: N_grid must be even");
  if (std::abs(spec.wall.kappa(L) - 1.0) >= 1e-10 || std::abs(spec.wall.kappa(-L) + 1.0) >= 1e-10)
    throw InsufficientWindow("solve_dirac_1d: wall not saturated at the window ends");

  const double theta_gap =
      std::hypot(spec.theta, spec.v * spec.mu_hat / spec.khat2.norm());
  Dirac0Solve sol = solve_dirac0(spec, L, N_grid, opt.scheme);
  GapFilterResult kept = filter_gap_states(sol, theta_gap, opt, N_grid);
  if (kept.z.empty())
    throw InsufficientWindow("solve_dirac_1d: boundary-mass filter removed all candidates");

  DiracSpectrum out;
  out.theta_gap = theta_gap;
  out.eigenvalues = kept.z;
  out.N = (int(kept.z.size()) - 1) / 2;
  out.grid = sol.grid;
  if (opt.keep_eigenfunctions) out.alpha0 = kept.vectors;

  if (opt.check_resolution) {
    Dirac0Solve half = solve_dirac0(spec, L, N_grid / 2, opt.scheme);
    GapFilterResult kept_half = filter_gap_states(half, theta_gap, opt, N_grid / 2);
    double shift = std::numeric_limits<double>::infinity();
    if (kept_half.z.size() == kept.z.size()) {
      shift = 0.0;
      for (size_t i = 0; i < kept.z.size(); ++i)
        shift = std::max(shift, std::abs(kept.z[i] - kept_half.z[i]));
    }
    out.resolution_shift = shift;
  }
  return out;
}

Eigen::MatrixXcd assemble_dirac_matrix(const DiracOperatorSpec& spec, double L, int N_grid,
                                       DzScheme scheme) {
  const int n = N_grid;
  const Eigen::VectorXd grid = window_grid(L, n);
  const Eigen::MatrixXd d = derivative_matrix(L, n, scheme);
  const Eigen::MatrixXcd Dz = cdouble(0.0, -1.0) * d.cast<cdouble>();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  Eigen::Matrix2cd sigma3 = Eigen::Matrix2cd::Zero();
  sigma3(0, 0) = 1.0;
  sigma3(1, 1) = -1.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      if (spec.sigma_k2(a, b) != cdouble(0.0, 0.0))
        M.block(a * n, b * n, n, n) += spec.sigma_k2(a, b) * Dz;
      if (spec.sigma_k1(a, b) != cdouble(0.0, 0.0))
        M.block(a * n, b * n, n, n) +=
            spec.mu_hat * spec.sigma_k1(a, b) * Eigen::MatrixXcd::Identity(n, n);
    }
  for (int i = 0; i < n; ++i) {
    const cdouble tk = spec.theta * spec.wall.kappa(grid(i));
    M(i, i) += tk * sigma3(0, 0);
    M(n + i, n + i) += tk * sigma3(1, 1);
  }
  return M;
}

Eigen::MatrixXcd assemble_dirac0_matrix(const DiracOperatorSpec& spec, double L, int N_grid,
                                        DzScheme scheme) {
  DiracOperatorSpec s0 = spec;
  const double nrm = spec.khat2.norm();
  // D_0 = v |khat2| sigma_1 D_zeta - (v/|khat2|) mu sigma_2 + theta kappa sigma_3;
  // pauli_combo(v, m) = v (m1 sigma_1 - m2 sigma_2), so m = (0, 1/nrm) gives
  // the -(v/nrm) sigma_2 term
  s0.sigma_k2 = pauli_combo(spec.v, Eigen::Vector2d(nrm, 0.0));
  s0.sigma_k1 = pauli_combo(spec.v, Eigen::Vector2d(0.0, 1.0 / nrm));
  return assemble_dirac_matrix(s0, L, N_grid, scheme);
}

Eigen::VectorXcd gauge_diagonal(const DiracOperatorSpec& spec, double L, int N_grid) {
  const UnitaryEquivalence ue = unitary_equivalence_constants(spec.khat1, spec.khat2, spec.v);
  const Eigen::VectorXd grid = window_grid(L, N_grid);
  Eigen::VectorXcd g(2 * N_grid);
  for (int i = 0; i < N_grid; ++i) {
    const cdouble phase = std::exp(cdouble(0.0, spec.mu_hat * ue.K_const * grid(i)));
    g(i) = ue.omega * phase;
    g(N_grid + i) = std::conj(ue.omega) * phase;
  }
  return g;
}

Eigen::MatrixXcd map_alpha_to_dirac_frame(const DiracSpectrum& spec_result,
                                          const DiracOperatorSpec& spec) {
  // alpha = N(mu)^* alpha0: multiply by the conjugate of the gauge diagonal
  const int n = int(spec_result.grid.size());
  const double L = -spec_result.grid(0);  // grid spans [-L, L)
  const Eigen::VectorXcd g = gauge_diagonal(spec, L, n);
  Eigen::MatrixXcd out = spec_result.alpha0;
  for (int c = 0; c < out.cols(); ++c) out.col(c).array() *= g.conjugate().array();
  return out;
}

// The mu_hat-independent objects of the D0 family are the protected zero-mode
// line and, for each j >= 1, the two-dimensional invariant subspace spanned by
// the +-j pair (sigma_2 anticommutes with D0(0), so the pair's span is fixed
// while the eigenvectors rotate inside it as mu_hat varies). The overlap
// reported is the smallest principal-angle cosine of those subspaces across
// the family.
MuInvarianceReport eigenfunction_mu_invariance_check(const DiracOperatorSpec& base,
                                                     const std::vector<double>& mu_hats,
                                                     double L, int N_grid) {
  MuInvarianceReport rep;
  rep.mu_hats = mu_hats;
  std::vector<DiracSpectrum> sols;
  for (double mu : mu_hats) {
    DiracOperatorSpec s = base;
    s.mu_hat = mu;
    sols.push_back(solve_dirac_1d(s, L, N_grid));
  }
  rep.min_overlap = 1.0;
  const int count = int(sols[0].eigenvalues.size());
  const int N = sols[0].N;
  for (size_t i = 1; i < sols.size(); ++i) {
    if (int(sols[i].eigenvalues.size()) != count) {
      rep.comparable = false;
      return rep;
    }
    // zero-mode line: straight overlap
    const int mid = count / 2;
    rep.min_overlap = std::min(
        rep.min_overlap, std::abs(sols[0].alpha0.col(mid).dot(sols[i].alpha0.col(mid))));
    // paired subspaces: smallest singular value of the 2x2 overlap Gram
    for (int j = 1; j <= N; ++j) {
      Eigen::MatrixXcd A(sols[0].alpha0.rows(), 2), B(sols[0].alpha0.rows(), 2);
      A.col(0) = sols[0].alpha0.col(mid - j);
      A.col(1) = sols[0].alpha0.col(mid + j);
      B.col(0) = sols[i].alpha0.col(mid - j);
      B.col(1) = sols[i].alpha0.col(mid + j);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A.adjoint() * B);
      rep.min_overlap = std::min(rep.min_overlap, svd.singularValues().minCoeff());
    }
  }
  return rep;
}

BlockSpectrumSample sample_block_spectrum(double mu, double delta, long m_max,
                                          const std::vector<double>& base_z, double v,
                                          double theta, const EdgeFrame& frame) {
  if (delta <= 0.0) throw Error("sample_block_spectrum: delta must be positive");
  BlockSpectrumSample out;
  out.mu = mu;
  out.delta = delta;
  out.theta_gap = std::abs(theta);
  const double k2n = frame.khat2.norm();
  for (KPoint p : {KPoint::K, KPoint::Kp}) {
    for (long m = -m_max; m <= m_max; ++m) {
      WrapData w = wrap_data(frame, WrapIndex{p, m});
      BlockSpectrumEntry e;
      e.index = w.index;
      e.gamma = w.gamma;
      e.mu_hat = mu + w.gamma / delta;
      DiracSpectrum s = closed_form_spectrum(base_z, e.mu_hat, v, theta, k2n);
      e.z = s.eigenvalues;
      e.in_gap.reserve(e.z.size());
      for (double z : e.z) e.in_gap.push_back(std::abs(z) < out.theta_gap);
      out.entries.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace edgespec
