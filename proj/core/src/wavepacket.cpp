#include "edgespec/wavepacket.hpp"

#include <cmath>

namespace edgespec {

EdgeWavepacket::EdgeWavepacket(WrapData wrap, int j, double mu, double delta,
                               const DiracPointData& dp, const EdgeFrame& frame,
                               const DiracOperatorSpec& dirac_spec,
                               const DiracSpectrum& dirac_solution)
    : wrap_(wrap), j_(j), mu_(mu), delta_(delta), dp_(&dp), frame_(frame) {
  mu_hat_ = mu + wrap_.gamma / delta;
  const int col = j + dirac_solution.N;
  if (col < 0 || col >= int(dirac_solution.eigenvalues.size()))
    throw Error("EdgeWavepacket: branch j outside [-N, N]");
  energy_ = dp.E_D + delta * dirac_solution.eigenvalues[size_t(col)];
  k_par_ = frame.lattice.K.dot(frame.vhat1) + delta * mu;
  grid_ = dirac_solution.grid;
  window_L_ = -grid_(0);
  // envelope in the D(mu_hat) frame, normalized to unit L2 norm
  Eigen::MatrixXcd all = map_alpha_to_dirac_frame(dirac_solution, dirac_spec);
  const int n = int(grid_.size());
  alpha_.resize(2, n);
  const double h = 2.0 * window_L_ / n;
  const double nrm = all.col(col).norm() * std::sqrt(h);
  for (int i = 0; i < n; ++i) {
    alpha_(0, i) = all(i, col) / nrm;
    alpha_(1, i) = all(n + i, col) / nrm;
  }
}

Eigen::Vector2cd EdgeWavepacket::envelope(double zeta) const {
  const int n = int(grid_.size());
  const double h = 2.0 * window_L_ / n;
  if (zeta <= -window_L_ + h || zeta >= window_L_ - 2.0 * h) return Eigen::Vector2cd::Zero();
  const double t = (zeta + window_L_) / h;
  const int i1 = int(std::floor(t));
  const double f = t - i1;
  // Catmull-Rom cubic through the four surrounding samples
  auto interp = [&](int comp) {
    const cdouble p0 = alpha_(comp, i1 - 1), p1 = alpha_(comp, i1), p2 = alpha_(comp, i1 + 1),
                  p3 = alpha_(comp, i1 + 2);
    return p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                          f * (3.0 * (p1 - p2) + p3 - p0)));
  };
  return {interp(0), interp(1)};
}

cdouble EdgeWavepacket::bloch_component(int which, const Eigen::Vector2d& x) const {
  const LatticeBasis& lat = frame_.lattice;
  const Eigen::Vector2d Ks = dp_->kstar_vec(lat);
  const Eigen::VectorXcd& c = which == 0 ? dp_->Phi1 : dp_->Phi2;
  cdouble acc{0.0, 0.0};
  for (int i = 0; i < dp_->basis.dim(); ++i)
    acc += c(i) * std::exp(cdouble(0.0, (Ks + dp_->basis.kappa(lat, i)).dot(x)));
  return acc;
}

cdouble EdgeWavepacket::eval_aug(const Eigen::Vector2d& x, double s) const {
  const LatticeBasis& lat = frame_.lattice;
  const double phase = (mu_ * delta_ + wrap_.gamma) * frame_.khat1.dot(x) +
                       (wrap_.lambda + lat.K.dot(lat.v2)) * s;
  const double zeta = delta_ * (frame_.khat2.dot(x) + s);  // khat2.(x + s v2)
  const Eigen::Vector2cd a = envelope(zeta);
  if (a.squaredNorm() == 0.0) return {0.0, 0.0};
  return std::exp(cdouble(0.0, phase)) *
         (bloch_component(0, x) * a(0) + bloch_component(1, x) * a(1));
}

EdgeWavepacket build_wavepacket(WrapIndex I, int j, double mu, double delta,
                                const DiracPointData& dp, const EdgeFrame& frame,
                                const DiracOperatorSpec& dirac_spec,
                                const DiracSpectrum& dirac_solution) {
  if (delta <= 0.0) throw Error("build_wavepacket: delta must be positive");
  WrapData w = wrap_data(frame, I);
  if (std::abs(w.gamma) > delta)
    throw IndexOutsideL("build_wavepacket: |gamma_I| > delta, multiscale compatibility fails");
  if (I.kstar != dp.kstar || I.kstar != dirac_spec.kstar)
    throw Error("build_wavepacket: index sublattice does not match the Dirac data");
  return EdgeWavepacket(w, j, mu, delta, dp, frame, dirac_spec, dirac_solution);
}

namespace {

// periodized transverse Fourier coefficients of y2 -> alpha_b(delta * y2)
// over the window of W cells, from the interpolated envelope
std::vector<Eigen::Vector2cd> envelope_window_fourier(const EdgeWavepacket& wp, int W,
                                                      int l_max) {
  const int M = 8 * W;
  std::vector<Eigen::Vector2cd> samples(static_cast<size_t>(M));
  for (int i = 0; i < M; ++i) {
    const double y2 = W * (double(i) / M - 0.5);
    samples[size_t(i)] = wp.envelope(wp.delta() * y2);
  }
  std::vector<Eigen::Vector2cd> coef(size_t(2 * l_max + 1), Eigen::Vector2cd::Zero());
  for (int l = -l_max; l <= l_max; ++l) {
    Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
    for (int i = 0; i < M; ++i) {
      const double y2 = W * (double(i) / M - 0.5);
      acc += samples[size_t(i)] * std::exp(cdouble(0.0, -2.0 * M_PI * l * y2 / W));
    }
    coef[size_t(l + l_max)] = acc / double(M);
  }
  return coef;
}

}  // namespace

ResidualReport dw_residual(const EdgeWavepacket& wp, const RationalEdge& edge,
                           const LatticeBasis& lat, const PeriodicScalarField& V,
                           const PeriodicScalarField& a, const DomainWall& wall,
                           const ResidualOptions& opt) {
  const double delta = wp.delta();
  const EdgeFrame& frame = wp.frame();
  if (std::abs(frame.r - edge.r()) > 1e-12)
    throw IncommensurateInput("dw_residual: wavepacket frame is not the given rational edge");

  // window size from the envelope decay: mass outside < tail_tol
  int N_t = opt.N_t;
  if (N_t == 0) {
    const double theta_tilde =
        std::abs(wp.dirac_point().theta_coeff.value_or(1.0)) /
        (std::abs(wp.dirac_point().upsilon) * frame.khat2.norm());
    const double halfwidth = 0.5 * std::log(1.0 / opt.tail_tol) / (delta * theta_tilde) + 2.0;
    N_t = (int(std::ceil(2.0 * halfwidth)) / 3 + 1) * 3;
  }

  auto evaluate = [&](int cutoff, int W) {
    CylinderProblem pb =
        assemble_cylinder(edge, lat, wp.k_par(), delta, 0.0, W, cutoff, V, a, wall, false);
    const CylinderBasis& bs = pb.basis;
    // project Psi on the basis: every Bloch wave P_i + (mu delta + gamma) khat1
    // lands on a longitudinal mode; the envelope spreads over transverse modes
    const int l_max = std::min(bs.Nj, 3 * W / 4);
    auto env = envelope_window_fourier(wp, W, l_max);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(bs.dim());
    const DiracPointData& dp = wp.dirac_point();
    const Eigen::Vector2d Ks = dp.kstar_vec(lat);
    for (int i = 0; i < dp.basis.dim(); ++i) {
      const Eigen::Vector2d P =
          Ks + dp.basis.kappa(lat, i) +
          (wp.mu() * delta + wp.wrap().gamma) * frame.khat1;
      const double n_real = (P.dot(frame.vhat1) - bs.q0) * double(edge.a1) / (2.0 * M_PI);
      const double j_real = P.dot(frame.vhat2) * double(W) / (2.0 * M_PI);
      const long n = std::lround(n_real);
      const long j_base = std::lround(j_real);
      if (std::abs(n_real - double(n)) > 1e-8 || std::abs(j_real - double(j_base)) > 1e-8)
        throw IncommensurateInput("dw_residual: wavepacket momenta off the strip grid");
      for (int l = -l_max; l <= l_max; ++l) {
        const long jj = j_base + l;
        if (!bs.contains(int(n), int(jj))) continue;
        c(bs.index(int(n), int(jj))) +=
            dp.Phi1(i) * env[size_t(l + l_max)](0) + dp.Phi2(i) * env[size_t(l + l_max)](1);
      }
    }
    const double nrm = c.norm();
    if (nrm == 0.0) throw Error("dw_residual: zero wavepacket");
    const Eigen::VectorXcd r = pb.apply(c) - wp.energy() * c;
    return r.norm() / nrm;
  };

  ResidualReport rep;
  rep.N_t = N_t;
  rep.relative_residual = evaluate(opt.cutoff, N_t);
  rep.norm = 1.0;
  if (opt.check_resolution) {
    const double coarse = evaluate(std::max(2, opt.cutoff - 1), N_t);
    rep.resolution_disagreement =
        std::abs(coarse - rep.relative_residual) / rep.relative_residual;
    if (rep.resolution_disagreement > 0.2)
      throw UnderresolvedGrid("dw_residual: grid-halving disagreement exceeds 20%");
  }
  return rep;
}

}  // namespace edgespec
