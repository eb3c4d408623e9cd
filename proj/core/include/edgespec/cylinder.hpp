#pragma once

#include <Eigen/SparseCore>
#include <map>

#include "edgespec/dirac1d.hpp"

namespace edgespec {

struct IncommensurateInput : Error {
  using Error::Error;
};
struct BranchMatchingAmbiguous : Error {
  using Error::Error;
};

/// Rational edge slope r = b1/a1 with coprime integers, a1 > 0.
struct RationalEdge {
  long a1 = 1, b1 = 0;
  double r() const { return double(b1) / double(a1); }
};

/// Plane-wave basis of the fibered rational-edge problem on the cylinder:
/// pseudo-periodic modes e^{i P . x} with P = q_n khat1 + t_j khat2,
/// q_n = k_par + 2 pi n / a1 and t_j = 2 pi j / W, on the transverse window
/// of W = N_t unit cells (periodic, with a compensating mirror wall).
struct CylinderBasis {
  long a1 = 1;
  int W = 0;        // transverse cells (divisible by 3 so the K-offsets are on-grid)
  int Nn = 0, Nj = 0;
  double k_par = 0.0;
  // base longitudinal momentum: a1*k_par folded to [-pi, pi) then divided by
  // a1, so the truncated mode window is centered and the assembly is exactly
  // 2 pi / a1 - periodic in k_par
  double q0 = 0.0;

  int n_modes() const { return 2 * Nn + 1; }
  int j_modes() const { return 2 * Nj + 1; }
  int dim() const { return n_modes() * j_modes(); }
  int index(int n, int j) const { return (j + Nj) * n_modes() + (n + Nn); }
  bool contains(int n, int j) const { return std::abs(n) <= Nn && std::abs(j) <= Nj; }
  double qn(int n) const { return q0 + 2.0 * M_PI * double(n) / double(a1); }
  double tj(int j) const { return 2.0 * M_PI * double(j) / double(W); }
};

struct CylinderProblem {
  RationalEdge edge;
  EdgeFrame frame;
  double k_par = 0.0, delta = 0.0, s_shift = 0.0;
  int N_t = 0, cutoff = 0;
  CylinderBasis basis;
  Eigen::SparseMatrix<cdouble> H;  // empty when assembled matrix-free
  double hermiticity_residual = 0.0;
  std::vector<cdouble> wall_fourier;  // coefficients of the periodized wall, l = -l_max..l_max
  int wall_band = 0;

  // coupling lists for the matrix-free application
  struct Coupling {
    long dn = 0, dj = 0;
    cdouble coef;
  };
  std::vector<Coupling> v_couplings;
  std::vector<Coupling> a_couplings;  // wall-modulated sigma_2 couplings (per a-mode)

  /// y = H c without the assembled matrix (kinetic diagonal + potential
  /// shifts + wall-convolved sigma_2 gradient couplings).
  Eigen::VectorXcd apply(const Eigen::VectorXcd& c) const;
};

/// Supercell assembly of the domain-wall operator on the cylinder fiber s:
///   -(grad) . [Id - delta kappa(delta khat2.(x + s v2)) a(x) sigma_2] (grad) + V.
/// Requires a rational frame; irrational slopes are refused
/// (IncommensurateInput) - approach them through rational approximants.
/// With build_matrix = false only the coupling lists are prepared (use
/// CylinderProblem::apply); eigensolves need the assembled matrix.
CylinderProblem assemble_cylinder(const RationalEdge& edge, const LatticeBasis& lat,
                                  double k_par, double delta, double s_shift, int N_t,
                                  int cutoff, const PeriodicScalarField& V,
                                  const PeriodicScalarField& a, const DomainWall& wall,
                                  bool build_matrix = true);

struct EdgeEigenpair {
  double E = 0.0;
  double participation_cells = 0.0;  // effective number of occupied transverse cells
  double center = 0.0;               // circular center of transverse mass, in cell units
  double dist_from_wall = 0.0;       // circular distance of center from the wall plane
  bool localized = false;            // participation below 0.3 * N_t
  bool at_main_wall = false;         // centered on the physical wall, not its mirror
};

struct SpectrumWindow {
  double center = 0.0;
  double half_width = 0.0;
};

/// Eigenvalues in the window with transverse localization diagnostics,
/// via shift-invert Lanczos with deflated restarts about the window center.
std::vector<EdgeEigenpair> edge_spectrum(const CylinderProblem& problem,
                                         const SpectrumWindow& window, int max_pairs = 24);

/// All eigenvalues of the problem (dense solve) - only for small bases.
Eigen::VectorXd dense_spectrum(const CylinderProblem& problem);

struct BranchPrediction {
  double E = 0.0;
  std::vector<KPoint> branches;  // sublattices sharing this prediction
  int j = 0;                     // eigenvalue branch index, 0 = protected crossing
};

struct ComparisonRow {
  double delta = 0.0;
  double E_numerical = 0.0;
  double E_predicted = 0.0;
  double error = 0.0;
  int j = 0;
  std::string branch;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::map<int, double> fitted_order;  // per branch index j, across the delta list
};

struct EffectiveModel {
  double E_D = 0.0;
  double upsilon = 0.0;  // upsilon_D > 0
  double theta = 0.0;
  std::map<KPoint, std::vector<double>> base_z;  // mu_hat = 0 eigenvalues per sublattice
};

/// Desk-scale check of the resolvent expansion's spectral consequence:
/// localized gap eigenvalues against E_D + delta z_j(mu), matched per branch,
/// with the empirical convergence order across the delta list.
ComparisonTable compare_to_effective(const RationalEdge& edge, const LatticeBasis& lat,
                                     const std::vector<double>& deltas, double mu,
                                     const EffectiveModel& model, int N_t_at_delta0p1,
                                     int cutoff, const PeriodicScalarField& V,
                                     const PeriodicScalarField& a, const DomainWall& wall,
                                     double match_tol);

struct KparPeriodicityReport {
  double k_par = 0.0, shift = 0.0;
  std::vector<double> spec_base, spec_shifted;
  double max_deviation = 0.0;
};

/// spec(H_{k_par + 2 pi / a1}) = spec(H_{k_par}) on the fiber, checked on the
/// localized in-window eigenvalues.
KparPeriodicityReport kpar_periodicity_check(const RationalEdge& edge, const LatticeBasis& lat,
                                             double k_par, double delta, double s_shift,
                                             int N_t, int cutoff,
                                             const PeriodicScalarField& V,
                                             const PeriodicScalarField& a,
                                             const DomainWall& wall,
                                             const SpectrumWindow& window);

}  // namespace edgespec
