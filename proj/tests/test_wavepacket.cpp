#include "doctest.h"
#include "edgespec/averaging.hpp"
#include "edgespec/wavepacket.hpp"

#include <cmath>

using namespace edgespec;

namespace {
const LatticeBasis lat = LatticeBasis::build();

struct Setup {
  PeriodicScalarField V, a;
  DiracPointData dpK;
};

Setup& setup() {
  static Setup s = [] {
    Setup t;
    t.V = synth_honeycomb_potential(PotentialKind::Trig, 10.0, std::nullopt, lat).field;
    t.a = synth_honeycomb_potential(PotentialKind::Trig, 0.8, std::nullopt, lat).field;
    t.dpK = detect_dirac_point(lat, t.V, KPoint::K, 6);
    compute_theta(lat, t.a, t.dpK);
    return t;
  }();
  return s;
}

EdgeWavepacket make_wp(double r, double mu, double delta, int j = 0, int n_grid = 512) {
  Setup& s = setup();
  EdgeFrame frame = EdgeFrame::build(lat, r);
  DiracOperatorSpec spec = DiracOperatorSpec::build(s.dpK, frame, mu);  // mu_hat = mu at (K, 0)
  DiracSpectrum sol = solve_dirac_1d(spec, 30.0, n_grid);
  return build_wavepacket(WrapIndex{KPoint::K, 0}, j, mu, delta, s.dpK, frame, spec, sol);
}
}  // namespace

TEST_CASE("pseudo-periodicity of the augmented wavepacket") {
  EdgeWavepacket wp = make_wp(0.7, 0.2, 0.1);
  const EdgeFrame& f = wp.frame();
  const cdouble phase = std::exp(cdouble(0.0, wp.k_par()));
  for (auto [x0, s0] : {std::pair{Eigen::Vector2d(0.3, -0.2), 0.7},
                        std::pair{Eigen::Vector2d(-1.1, 0.45), -2.3},
                        std::pair{Eigen::Vector2d(2.2, 1.8), 5.0}}) {
    const cdouble base = wp.eval_aug(x0, s0);
    REQUIRE(std::abs(base) > 1e-8);
    // (x + v1, s + r) gains e^{i k_par}
    const cdouble shifted1 = wp.eval_aug(x0 + lat.v1, s0 + f.r);
    CHECK(std::abs(shifted1 - phase * base) < 1e-10 * std::max(1.0, std::abs(base)));
    // (x + v2, s - 1) is invariant
    const cdouble shifted2 = wp.eval_aug(x0 + lat.v2, s0 - 1.0);
    CHECK(std::abs(shifted2 - base) < 1e-10 * std::max(1.0, std::abs(base)));
  }
}

TEST_CASE("transverse decay of the augmented wavepacket") {
  EdgeWavepacket wp = make_wp(0.0, 0.0, 0.1);
  const Eigen::Vector2d x(0.4, 0.1);
  const double near = std::abs(wp.eval_aug(x, 0.0));
  const double far = std::abs(wp.eval_aug(x, 60.0));
  const double farther = std::abs(wp.eval_aug(x, 120.0));
  CHECK(near > 10.0 * far);
  CHECK(far > farther);
}

TEST_CASE("energy bookkeeping: E = E_D + delta z_j(mu_hat)") {
  Setup& s = setup();
  EdgeFrame frame = EdgeFrame::build(lat, 0.0);
  DiracOperatorSpec spec = DiracOperatorSpec::build(s.dpK, frame, 0.3);
  DiracSpectrum sol = solve_dirac_1d(spec, 30.0, 512);
  for (int j = -sol.N; j <= sol.N; ++j) {
    EdgeWavepacket wp =
        build_wavepacket(WrapIndex{KPoint::K, 0}, j, 0.3, 0.1, s.dpK, frame, spec, sol);
    CHECK(wp.energy() ==
          doctest::Approx(s.dpK.E_D + 0.1 * sol.eigenvalues[size_t(j + sol.N)]).epsilon(1e-14));
  }
}

TEST_CASE("restriction depends only on Kstar for rational edges (gamma = 0)") {
  Setup& s = setup();
  EdgeFrame frame = EdgeFrame::build(lat, 0.0);
  DiracOperatorSpec spec = DiracOperatorSpec::build(s.dpK, frame, 0.1);
  DiracSpectrum sol = solve_dirac_1d(spec, 30.0, 512);
  EdgeWavepacket w0 =
      build_wavepacket(WrapIndex{KPoint::K, 0}, 0, 0.1, 0.05, s.dpK, frame, spec, sol);
  EdgeWavepacket w1 =
      build_wavepacket(WrapIndex{KPoint::K, 1}, 0, 0.1, 0.05, s.dpK, frame, spec, sol);
  for (auto& x : {Eigen::Vector2d(0.2, 0.8), Eigen::Vector2d(-3.0, 1.4)}) {
    const cdouble r0 = w0.eval_restriction(x), r1 = w1.eval_restriction(x);
    CHECK(std::abs(r0 - r1) < 1e-10 * std::max(1.0, std::abs(r0)));
  }
  // the augmented functions differ away from s = 0
  const Eigen::Vector2d x(0.2, 0.8);
  CHECK(std::abs(w0.eval_aug(x, 0.4) - w1.eval_aug(x, 0.4)) > 1e-4);
}

TEST_CASE("wavepacket norm: ||Psi_aug|| over cell x line = ||alpha|| (1 + O(delta))") {
  // with ||alpha||_{L2} = 1 the augmented norm over Omega x R_s is
  // delta^{-1/2} (1 + O(delta)); quadrature at two deltas shows the trend
  auto cell_line_norm = [&](const EdgeWavepacket& wp) {
    const EdgeFrame& f = wp.frame();
    const int nc = 16;
    const double smax = 30.0 / wp.delta();
    const int ns = int(smax * 4);
    double acc = 0.0;
    for (int i = 0; i < nc; ++i)
      for (int l = 0; l < nc; ++l) {
        const Eigen::Vector2d x = ((i + 0.5) / nc) * lat.v1 + ((l + 0.5) / nc) * lat.v2;
        for (int m = 0; m < ns; ++m) {
          const double sv = -smax + 2.0 * smax * (m + 0.5) / ns;
          acc += std::norm(wp.eval_aug(x, sv));
        }
      }
    return std::sqrt(acc * (1.0 / (nc * nc)) * (2.0 * smax / ns));
  };
  const EdgeWavepacket w1 = make_wp(0.0, 0.0, 0.2, 0, 256);
  const EdgeWavepacket w2 = make_wp(0.0, 0.0, 0.1, 0, 256);
  const double r1 = cell_line_norm(w1) * std::sqrt(0.2);
  const double r2 = cell_line_norm(w2) * std::sqrt(0.1);
  CHECK(std::abs(r1 - 1.0) < 0.15);
  CHECK(std::abs(r2 - 1.0) < 0.15);
}

TEST_CASE("restriction along the edge: slow factor varies at rate O(delta)") {
  // Psi(x) = Phi(x)^T U(delta khat1.x, delta khat2.x): the reconstructed slow
  // factor moves O(delta) per unit step while Psi itself moves O(1)
  EdgeWavepacket wp = make_wp(std::sqrt(2.0), 0.0, 0.05);
  const EdgeFrame& f = wp.frame();
  const Eigen::Vector2d x0 = 0.37 * f.vhat1;
  const Eigen::Vector2d x1 = x0 + f.vhat2;
  const Eigen::Vector2cd U0 = wp.envelope(wp.delta() * f.khat2.dot(x0));
  const Eigen::Vector2cd U1 = wp.envelope(wp.delta() * f.khat2.dot(x1));
  CHECK((U1 - U0).norm() < 3.0 * wp.delta() * U0.norm());
  const cdouble p0 = wp.eval_restriction(x0);
  const cdouble p1 = wp.eval_restriction(x1);
  CHECK(std::abs(p1 - p0) > 10.0 * (U1 - U0).norm());
}

TEST_CASE("IndexOutsideL rejected for |gamma| > delta") {
  Setup& s = setup();
  EdgeFrame frame = EdgeFrame::build(lat, std::sqrt(2.0));
  DiracOperatorSpec spec = DiracOperatorSpec::build(s.dpK, frame, 0.0);
  DiracSpectrum sol = solve_dirac_1d(spec, 30.0, 256);
  CHECK_THROWS_AS(build_wavepacket(WrapIndex{KPoint::K, 1}, 0, 0.0, 0.1, s.dpK, frame, spec, sol),
                  IndexOutsideL);
}

TEST_CASE("averaging: isometry T T* = Id on a function bank") {
  Setup& s = setup();
  EdgeFrame frame = EdgeFrame::build(lat, 0.4);
  WrapData w = wrap_data(frame, WrapIndex{KPoint::K, 0});
  CellAverager avg(frame, w, s.dpK, 40);
  std::vector<SpinorLine> bank;
  for (int t = 0; t < 5; ++t) {
    bank.push_back([t](double z) {
      const double e = std::exp(-0.5 * z * z / (1.0 + 0.3 * t));
      return Eigen::Vector2cd(e * std::cos(0.4 * t * z),
                              e * cdouble(0.2, 0.1 * t) * std::sin(0.3 * z + 0.2));
    });
  }
  double worst = 0.0;
  for (const auto& g : bank) {
    AugmentedFunction F = [&](const Eigen::Vector2d& x, double sv) {
      return avg.adjoint(g, x, sv);
    };
    for (double zeta : {-1.7, -0.3, 0.0, 0.9, 2.4}) {
      const Eigen::Vector2cd got = avg.apply(F, zeta);
      const Eigen::Vector2cd expect = g(zeta);
      worst = std::max(worst, (got - expect).norm());
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("averaging: linearity (zero maps to zero) and scaled isometry") {
  Setup& s = setup();
  EdgeFrame frame = EdgeFrame::build(lat, 0.0);
  WrapData w = wrap_data(frame, WrapIndex{KPoint::K, 0});
  CellAverager avg(frame, w, s.dpK, 32);
  AugmentedFunction zero = [](const Eigen::Vector2d&, double) { return cdouble(0.0, 0.0); };
  CHECK(avg.apply(zero, 0.7).norm() == 0.0);
  // J_{delta,I} J*_{delta,I} = Id as well (U_delta unitary)
  SpinorLine g = [](double z) {
    const double e = std::exp(-z * z);
    return Eigen::Vector2cd(e, 0.3 * e);
  };
  const double delta = 0.2;
  AugmentedFunction F = [&](const Eigen::Vector2d& x, double sv) {
    return avg.adjoint_scaled(g, delta, x, sv);
  };
  const Eigen::Vector2cd got = avg.apply_scaled(F, delta, 0.31);
  CHECK((got - g(0.31)).norm() < 1e-8);
}

TEST_CASE("averaging: off-diagonal pairing is small and shrinks with delta") {
  // <g, J_I J*_J g> for I != J probes the oscillation e^{i 2 pi m zeta/delta}
  // against the slow test function; non-stationary phase makes it vanish
  // rapidly as delta -> 0 (the area-bound mechanism for the off-diagonal
  // blocks)
  Setup& s = setup();
  EdgeFrame frame = EdgeFrame::build(lat, 0.0);
  WrapData wI = wrap_data(frame, WrapIndex{KPoint::K, 0});
  WrapData wJ = wrap_data(frame, WrapIndex{KPoint::K, 1});
  CellAverager avgI(frame, wI, s.dpK, 32);
  CellAverager avgJ(frame, wJ, s.dpK, 32);
  SpinorLine g = [](double z) {
    const double e = std::exp(-z * z);
    return Eigen::Vector2cd(e, cdouble(0.1, 0.4) * e);
  };
  auto pairing = [&](double delta) {
    AugmentedFunction F = [&](const Eigen::Vector2d& x, double sv) {
      return avgJ.adjoint_scaled(g, delta, x, sv);
    };
    // trapezoid in zeta over the support of g
    cdouble acc{0.0, 0.0};
    const int n = 160;
    const double Z = 4.0;
    for (int i = 0; i < n; ++i) {
      const double zeta = -Z + 2.0 * Z * (i + 0.5) / n;
      const Eigen::Vector2cd TIF = avgI.apply_scaled(F, delta, zeta);
      acc += (2.0 * Z / n) * (g(zeta).dot(TIF));
    }
    return std::abs(acc);
  };
  const double p1 = pairing(0.5);
  const double p2 = pairing(0.25);
  const double norm_g2 = std::sqrt(M_PI / 2.0) * (1.0 + 0.17);  // ||g||^2
  CHECK(p1 < 0.2 * norm_g2);
  CHECK(p2 < 0.25 * p1);
}

TEST_CASE("dw_residual: O(delta) scaling against the first-order oracle") {
  Setup& s = setup();
  RationalEdge zz{1, 0};
  EdgeFrame frame = EdgeFrame::build(lat, 0.0);
  DiracOperatorSpec spec = DiracOperatorSpec::build(s.dpK, frame, 0.0);
  DiracSpectrum sol = solve_dirac_1d(spec, 30.0, 512);

  // independent first-order residual norm ||r1|| from the multiscale
  // expansion: r1 = sum_b [-2 (khat2.grad Phi_b) alpha_b' + (W Phi_b) kappa alpha_b],
  // whose Phi-projection vanishes by the effective eigenvalue equation
  const int nb = s.dpK.basis.dim();
  const Eigen::Vector2d Ks = lat.K;
  Eigen::MatrixXcd dPhi(nb, 2), WPhi(nb, 2);
  const Eigen::MatrixXcd W = assemble_sigma2_coupling(lat, Ks, s.a, s.dpK.basis);
  for (int b = 0; b < 2; ++b) {
    const Eigen::VectorXcd& c = b == 0 ? s.dpK.Phi1 : s.dpK.Phi2;
    for (int i = 0; i < nb; ++i)
      dPhi(i, b) = cdouble(0.0, frame.khat2.dot(Ks + s.dpK.basis.kappa(lat, i))) * c(i);
    WPhi.col(b) = W * c;
  }
  // zeta-grams from the alpha grid
  const int n = int(sol.grid.size());
  const double h = 2.0 * 30.0 / n;
  Eigen::MatrixXcd al(n, 2), alp(n, 2);
  Eigen::MatrixXcd a_of = map_alpha_to_dirac_frame(sol, spec);
  const int zcol = int(sol.eigenvalues.size()) / 2;
  for (int i = 0; i < n; ++i) {
    al(i, 0) = a_of(i, zcol);
    al(i, 1) = a_of(n + i, zcol);
  }
  const double anorm = al.norm() * std::sqrt(h);
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < 2; ++b)
      alp(i, b) = (al((i + 1) % n, b) - al((i + n - 1) % n, b)) / (2.0 * h);
  Eigen::VectorXd kap(n);
  for (int i = 0; i < n; ++i) kap(i) = std::tanh(sol.grid(i));
  double norm2 = 0.0;
  for (int b = 0; b < 2; ++b)
    for (int bp = 0; bp < 2; ++bp) {
      const cdouble G1 = 4.0 * dPhi.col(b).dot(dPhi.col(bp));
      const cdouble G2 = -2.0 * dPhi.col(b).dot(WPhi.col(bp));
      const cdouble G3 = WPhi.col(b).dot(WPhi.col(bp));
      const cdouble A1 = alp.col(b).dot(alp.col(bp)) * h;
      const cdouble A2 = alp.col(b).dot((kap.array() * al.col(bp).array()).matrix()) * h;
      const cdouble A3 = (kap.array() * al.col(b).array())
                             .matrix()
                             .dot((kap.array() * al.col(bp).array()).matrix()) *
                         h;
      norm2 += std::real(G1 * A1) + 2.0 * std::real(G2 * A2) + std::real(G3 * A3);
    }
  const double oracle_C = std::sqrt(std::max(0.0, norm2)) / anorm;

  EdgeWavepacket wp1 = build_wavepacket(WrapIndex{KPoint::K, 0}, 0, 0.0, 0.1, s.dpK, frame, spec, sol);
  EdgeWavepacket wp2 = build_wavepacket(WrapIndex{KPoint::K, 0}, 0, 0.0, 0.05, s.dpK, frame, spec, sol);
  ResidualOptions opt;
  opt.cutoff = 4;
  const double r1 = dw_residual(wp1, zz, lat, s.V, s.a, DomainWall::tanh_wall(), opt).relative_residual;
  const double r2 = dw_residual(wp2, zz, lat, s.V, s.a, DomainWall::tanh_wall(), opt).relative_residual;
  // first-order scaling with ratio ~ 2
  const double ratio = r1 / r2;
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.6);
  // the measured constant matches the multiscale first-order norm
  CHECK(std::abs(r2 / 0.05 - oracle_C) < 0.05 * oracle_C);
}

TEST_CASE("dw_residual rejects incommensurate frames") {
  Setup& s = setup();
  EdgeFrame frame = EdgeFrame::build(lat, std::sqrt(2.0));
  DiracOperatorSpec spec = DiracOperatorSpec::build(s.dpK, frame, 0.0);
  DiracSpectrum sol = solve_dirac_1d(spec, 30.0, 256);
  EdgeWavepacket wp =
      build_wavepacket(WrapIndex{KPoint::K, 0}, 0, 0.0, 0.1, s.dpK, frame, spec, sol);
  CHECK_THROWS_AS(
      dw_residual(wp, RationalEdge{1, 0}, lat, s.V, s.a, DomainWall::tanh_wall(), {}),
      IncommensurateInput);
}
