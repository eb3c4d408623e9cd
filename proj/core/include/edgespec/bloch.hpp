#pragma once

#include <optional>

#include "edgespec/lattice.hpp"
#include "edgespec/potential.hpp"

namespace edgespec {

/// sigma_2-type conjugation-breaking perturbation of the bulk operator:
/// A = Id - delta * a(x) * sigma_2 (the bulk domain wall is frozen at +1;
/// pass a negative delta for the other asymptotic medium).
struct BulkPerturbation {
  double delta = 0.0;
  const PeriodicScalarField* a = nullptr;
};

/// Plane-wave matrix of -(grad + ik) . A (grad + ik) + V on the given wave
/// set. Without perturbation the entries are |k + kappa|^2 on the diagonal
/// plus the potential convolution V_{kappa - kappa'}.
Eigen::MatrixXcd assemble_bloch_hamiltonian(const LatticeBasis& lat,
                                            const Eigen::Vector2d& k,
                                            const PeriodicScalarField& V,
                                            const std::optional<BulkPerturbation>& pert,
                                            const PlaneWaveBasis& basis);

/// Matrix of the first-order coefficient d/d delta of the perturbed operator,
/// i.e. of grad . (a sigma_2 grad .) at quasimomentum k. The 2x2 pairing of
/// this matrix on the Dirac eigenspace is the theta-coefficient matrix.
Eigen::MatrixXcd assemble_sigma2_coupling(const LatticeBasis& lat, const Eigen::Vector2d& k,
                                          const PeriodicScalarField& a,
                                          const PlaneWaveBasis& basis);

struct BlochEigensystem {
  Eigen::Vector2d k;
  Eigen::VectorXd energies;   // ascending
  Eigen::MatrixXcd vectors;   // column b: Fourier coefficients of p_b
  double max_residual = 0.0;  // max_b |H p_b - E_b p_b| / (1 + |E_b|)
};

BlochEigensystem solve_bloch(const Eigen::MatrixXcd& H, const Eigen::Vector2d& k, int n_bands);

struct DispersionSlice {
  std::vector<double> lambdas;
  Eigen::MatrixXd energies;  // row: lambda index, col: band
};

DispersionSlice dispersion_slice(const LatticeBasis& lat, const PeriodicScalarField& V,
                                 const EdgeFrame& frame, const std::vector<double>& lambda_grid,
                                 int n_bands, const PlaneWaveBasis& basis);

struct NoFoldReport {
  double min_gap = 0.0;          // min |E_pm(k) - E_D| outside B_eps
  Eigen::Vector2d argmin_k;      // quasimomentum attaining the minimum
  bool pass = false;             // strictly positive minimum
  double C0 = 0.0;               // min gap at dist(k, KK) > eps0
  double C1 = 0.0;               // fitted slope of |E - E_D| vs dist on the annulus
  double annulus_eps0 = 0.0;
  double fit_rel_residual = 0.0; // rms relative deviation from the linear fit lower envelope
  int grid_n = 0;
  double eps = 0.0;
};

/// Uniform scan of the Brillouin zone (as the dual fundamental cell) for the
/// omnidirectional no-fold condition at E_D; distances are measured to the
/// union of the K and K' sublattices.
NoFoldReport nofold_scan(const LatticeBasis& lat, const PeriodicScalarField& V, double E_D,
                         int b_star, int grid_n, double eps, const PlaneWaveBasis& basis);

struct GapSplitting {
  double E_minus = 0.0, E_plus = 0.0;
  double predicted_minus = 0.0, predicted_plus = 0.0;
  double theta_abs = 0.0;
};

}  // namespace edgespec
