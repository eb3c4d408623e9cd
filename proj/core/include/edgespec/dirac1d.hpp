#pragma once

#include <functional>
#include <memory>

#include "edgespec/dirac_point.hpp"

namespace edgespec {

struct InsufficientWindow : Error {
  using Error::Error;
};

/// Domain wall kappa with bounded derivative and kappa(+-inf) = +-1. The id
/// participates in cache keys and in family-comparability checks. is_wall
/// distinguishes genuine walls (which get a compensating mirror when
/// periodized on a window) from constant/bulk profiles.
struct DomainWall {
  std::string id = "tanh";
  std::function<double(double)> kappa = [](double z) { return std::tanh(z); };
  bool is_wall = true;

  static DomainWall tanh_wall() { return {}; }
  /// tanh wall plus a compactly supported bump (for robustness studies).
  static DomainWall bumped(double height, double center, double halfwidth);
  /// frozen bulk profile kappa = value (no interface).
  static DomainWall constant(double value);
};

/// One effective 1D Dirac operator
///   D(mu_hat) = sigma(khat2) D_zeta + mu_hat sigma(khat1) + theta kappa(zeta) sigma_3,
/// with sigma(m) = upsilon (m1 sigma_1 - m2 sigma_2).
struct DiracOperatorSpec {
  KPoint kstar = KPoint::K;
  double mu_hat = 0.0;
  DomainWall wall;
  double v = 0.0;      // signed upsilon at kstar
  double theta = 0.0;  // conjugation-breaking coupling
  Eigen::Vector2d khat1, khat2;
  Eigen::Matrix2cd sigma_k2, sigma_k1;  // sigma(khat2), sigma(khat1)

  static DiracOperatorSpec build(const DiracPointData& dp, const EdgeFrame& frame,
                                 double mu_hat, DomainWall wall = DomainWall::tanh_wall());
};

struct DiracSpectrum {
  double theta_gap = 0.0;            // theta_gap(mu_hat)
  std::vector<double> eigenvalues;   // ascending, inside the gap, odd count
  int N = 0;                         // (count - 1) / 2
  // sampled eigenfunctions of the equivalent constant-coefficient-frame
  // operator D_0(mu_hat); column j matches eigenvalues[j]; row layout
  // (alpha_1(z_0..z_{n-1}), alpha_2(z_0..z_{n-1}))
  Eigen::MatrixXcd alpha0;
  Eigen::VectorXd grid;
  double resolution_shift = 0.0;     // max |z| movement under grid halving (if checked)
};

/// Closed-form spectrum of D(mu_hat) from the mu_hat = 0 eigenvalues:
///   z_0(mu) = -(upsilon_D/|khat2|) mu sign(theta),
///   z_{+-j}(mu) = +-sqrt(z_j^2 + (upsilon_D mu / |khat2|)^2),
///   theta_gap(mu) = sqrt(theta^2 + (upsilon_D mu / |khat2|)^2).
DiracSpectrum closed_form_spectrum(const std::vector<double>& base_z, double mu_hat, double v,
                                   double theta, double khat2_norm);

struct UnitaryEquivalence {
  double K_const = 0.0;       // (khat1 . khat2) / |khat2|^2
  cdouble omega{1.0, 0.0};    // |omega| = 1, omega^2 aligns upsilon zhat2 with upsilon |zhat2|
};

UnitaryEquivalence unitary_equivalence_constants(const Eigen::Vector2d& khat1,
                                                 const Eigen::Vector2d& khat2, double v);

enum class DzScheme : std::uint8_t { FourierSpectral, CentralDiff4 };

struct Dirac1dOptions {
  DzScheme scheme = DzScheme::FourierSpectral;
  double gap_margin = 1e-6;
  double boundary_mass_tol = 1e-8;  // mass in the outer 10% of the window
  bool check_resolution = false;    // re-solve at half grid and record the shift
  bool keep_eigenfunctions = true;
};

/// Spectral (or 4th-order FD) eigensolver for D(mu_hat) on the periodic
/// window [-L, L]. Works in the constant-coefficient frame D_0 (real
/// symmetric after a constant gauge), filters window artifacts by the
/// boundary-mass criterion, and returns the in-gap point spectrum.
DiracSpectrum solve_dirac_1d(const DiracOperatorSpec& spec, double L, int N_grid,
                             const Dirac1dOptions& opt = {});

/// Eigenfunctions of D(mu_hat) from the stored D_0-frame columns:
/// alpha = N(mu_hat)^* alpha0 with (N alpha)(z) = diag(omega, conj omega) alpha e^{i mu K z}.
Eigen::MatrixXcd map_alpha_to_dirac_frame(const DiracSpectrum& spec_result,
                                          const DiracOperatorSpec& spec);

/// Dense matrices on the grid, for the unitary-equivalence test.
Eigen::MatrixXcd assemble_dirac_matrix(const DiracOperatorSpec& spec, double L, int N_grid,
                                       DzScheme scheme);
Eigen::MatrixXcd assemble_dirac0_matrix(const DiracOperatorSpec& spec, double L, int N_grid,
                                        DzScheme scheme);
Eigen::VectorXcd gauge_diagonal(const DiracOperatorSpec& spec, double L, int N_grid);

struct MuInvarianceReport {
  bool comparable = true;      // same wall / branch count across the family
  // min over mu pairs of the zero-mode overlap and of the smallest
  // principal-angle cosine of the +-j paired invariant subspaces
  double min_overlap = 0.0;
  std::vector<double> mu_hats;
};

MuInvarianceReport eigenfunction_mu_invariance_check(const DiracOperatorSpec& base,
                                                     const std::vector<double>& mu_hats,
                                                     double L, int N_grid);

struct BlockSpectrumEntry {
  WrapIndex index;
  double gamma = 0.0;
  double mu_hat = 0.0;             // mu + gamma_I / delta
  std::vector<double> z;           // eigenvalues of D^{K_I}(mu_hat)
  std::vector<bool> in_gap;        // inside the unshifted gap (-|theta|, |theta|)
};

struct BlockSpectrumSample {
  double mu = 0.0, delta = 0.0;
  double theta_gap = 0.0;          // unshifted half-gap |theta|
  std::vector<BlockSpectrumEntry> entries;
};

/// Spectrum sample of the block-diagonal operator: for each I with |m| <=
/// m_max, the closed-form eigenvalues of D^{K_I}(mu + gamma_I/delta).
BlockSpectrumSample sample_block_spectrum(double mu, double delta, long m_max,
                                          const std::vector<double>& base_z, double v,
                                          double theta, const EdgeFrame& frame);

}  // namespace edgespec
