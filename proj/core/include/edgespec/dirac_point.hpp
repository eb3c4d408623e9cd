#pragma once

#include "edgespec/bloch.hpp"

namespace edgespec {

struct NoDoubleEigenvalue : Error {
  using Error::Error;
};
struct WrongSymmetryType : Error {
  using Error::Error;
};
struct VelocityZero : Error {
  using Error::Error;
};
struct NonDegeneracyFailure : Error {
  using Error::Error;
};

struct DiracTolerances {
  double degeneracy = 1e-8;        // scaled by (1 + |E_D|)
  double separation_factor = 10.0; // next bands at least this multiple away
  double velocity_min = 1e-6;
  int fit_radii = 8;               // log-spaced in [fit_r_min, fit_r_max]
  int fit_directions = 12;
  double fit_r_min = 1e-3;
  double fit_r_max = 1e-2;
  int scan_bands = 24;             // how many low bands to search for the degeneracy
};

/// Dirac point data at one high-symmetry vertex: the double eigenvalue E_D at
/// band pair (b_star, b_star + 1), the phase-normalized Dirac eigenbasis with
/// Phi1 in the tau rotation eigenspace and Phi2 = P C Phi1, the signed Dirac
/// coefficient upsilon (positive at K, negative at K'), and the radial-fit
/// cross-check of the velocity.
struct DiracPointData {
  KPoint kstar = KPoint::K;
  double E_D = 0.0;
  int b_star = 0;  // 1-based band index of the lower band of the touching pair
  PlaneWaveBasis basis;
  Eigen::VectorXcd Phi1, Phi2;
  double upsilon = 0.0;
  double upsilon_fit = 0.0;        // |slope| from the radial conical fit
  double upsilon_imag_residual = 0.0;
  double gap_estimate = 0.0;       // distance of bands b_star - 1, b_star + 2 from E_D
  std::optional<double> theta_coeff;  // filled by compute_theta

  Eigen::Vector2d kstar_vec(const LatticeBasis& lat) const {
    return kstar == KPoint::K ? lat.K : lat.Kp;
  }
};

DiracPointData detect_dirac_point(const LatticeBasis& lat, const PeriodicScalarField& V,
                                  KPoint kstar, int cutoff,
                                  const DiracTolerances& tol = {});

struct ThetaResult {
  double theta = 0.0;       // <Phi1, grad . (a sigma_2 grad Phi1)>
  Eigen::Matrix2cd Theta;   // full 2x2 pairing matrix, = theta * sigma_3
  double sigma3_residual = 0.0;  // |Theta - theta*sigma_3| (Frobenius)
};

/// Computes the conjugation-breaking coupling; throws NonDegeneracyFailure
/// when |theta| < threshold. Also stores theta into dp.theta_coeff.
ThetaResult compute_theta(const LatticeBasis& lat, const PeriodicScalarField& a,
                          DiracPointData& dp, double threshold = 1e-10);

/// Pairing matrix <Phi_j, -2i m.grad Phi_l>; equals
/// upsilon * (m1 sigma_1 - m2 sigma_2) for a phase-normalized Dirac basis.
Eigen::Matrix2cd sigma_matrix(const LatticeBasis& lat, const Eigen::Vector2d& m,
                              const DiracPointData& dp);

GapSplitting bulk_gap_splitting(const LatticeBasis& lat, const PeriodicScalarField& V,
                                const PeriodicScalarField& a, const DiracPointData& dp,
                                double delta);

}  // namespace edgespec
