#pragma once

#include "edgespec/cylinder.hpp"

namespace edgespec {

struct IndexOutsideL : Error {
  using Error::Error;
};
struct UnderresolvedGrid : Error {
  using Error::Error;
};

/// O(delta)-approximate augmented edge state
///   Psi_aug(x, s) = e^{i[(mu delta + gamma_I) khat1.x + (lambda_I + K.v2) s]}
///                   Phi^{K_I}(x)^T alpha_j(delta khat2.(x + s v2))
/// and its 2D restriction Psi(x) = Psi_aug(x, 0), with energy
/// E = E_D + delta z_j(mu + gamma_I/delta).
class EdgeWavepacket {
 public:
  EdgeWavepacket(WrapData wrap, int j, double mu, double delta, const DiracPointData& dp,
                 const EdgeFrame& frame, const DiracOperatorSpec& dirac_spec,
                 const DiracSpectrum& dirac_solution);

  cdouble eval_aug(const Eigen::Vector2d& x, double s) const;
  cdouble eval_restriction(const Eigen::Vector2d& x) const { return eval_aug(x, 0.0); }
  Eigen::Vector2cd envelope(double zeta) const;  // cubic interpolation of alpha_j
  cdouble bloch_component(int which, const Eigen::Vector2d& x) const;  // Phi_1 or Phi_2

  const WrapData& wrap() const { return wrap_; }
  int branch() const { return j_; }
  double mu() const { return mu_; }
  double delta() const { return delta_; }
  double energy() const { return energy_; }
  double k_par() const { return k_par_; }
  double mu_hat() const { return mu_hat_; }
  const DiracPointData& dirac_point() const { return *dp_; }
  const EdgeFrame& frame() const { return frame_; }

 private:
  WrapData wrap_;
  int j_ = 0;
  double mu_ = 0.0, delta_ = 0.0, mu_hat_ = 0.0;
  double energy_ = 0.0, k_par_ = 0.0;
  const DiracPointData* dp_;
  EdgeFrame frame_;
  Eigen::VectorXd grid_;
  Eigen::MatrixXcd alpha_;  // 2 x n samples in the D(mu_hat) frame
  double window_L_ = 0.0;
};

/// Builds the wavepacket for I in L(delta), i.e. |gamma_I| <= delta
/// (IndexOutsideL otherwise); j in [-N, N] selects the in-gap branch of the
/// provided D^{K_I}(mu + gamma_I/delta) solve.
EdgeWavepacket build_wavepacket(WrapIndex I, int j, double mu, double delta,
                                const DiracPointData& dp, const EdgeFrame& frame,
                                const DiracOperatorSpec& dirac_spec,
                                const DiracSpectrum& dirac_solution);

struct ResidualOptions {
  int N_t = 0;          // transverse window in cells; 0 = size from envelope decay
  int cutoff = 4;       // plane-wave shells
  double tail_tol = 1e-6;  // envelope mass allowed outside the window
  bool check_resolution = false;  // re-evaluate with cutoff - 1 and compare
};

struct ResidualReport {
  double relative_residual = 0.0;
  double norm = 0.0;
  int N_t = 0;
  double resolution_disagreement = 0.0;  // relative change under cutoff halving
};

/// L2-relative residual ||(H_dw - E) Psi|| / ||Psi|| of the 2D restriction on
/// the commensurate strip, evaluated in the cylinder plane-wave
/// representation (rational frames only).
ResidualReport dw_residual(const EdgeWavepacket& wp, const RationalEdge& edge,
                           const LatticeBasis& lat, const PeriodicScalarField& V,
                           const PeriodicScalarField& a, const DomainWall& wall,
                           const ResidualOptions& opt = {});

}  // namespace edgespec
