#pragma once

#include <complex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "edgespec/lattice.hpp"

namespace edgespec {

using cdouble = std::complex<double>;

/// Truncated dual-lattice wave set: integer coordinates n = (n1, n2) of
/// kappa = 2*pi*(n1*k1 + n2*k2). The hexagonal index set
///   max(|n1|, |n2|, |n1 - n2|) <= cutoff
/// is closed under negation and under the rotation R, so those operators act
/// exactly within the basis. An optional half-integer center (used by the
/// Dirac-point solver) shifts the hexagon so that the rotation about Kstar,
/// which acts on integer coordinates as an affine map, is an exact bijection
/// of the set.
class PlaneWaveBasis {
 public:
  static PlaneWaveBasis hexagonal(int cutoff);
  /// Hexagon centered at the fixed point of the affine rotation about Kstar.
  static PlaneWaveBasis dirac_centered(KPoint kstar, int cutoff);

  int cutoff() const { return cutoff_; }
  int dim() const { return int(waves_.size()); }
  const std::vector<Eigen::Vector2i>& waves() const { return waves_; }
  Eigen::Vector2i coords(int i) const { return waves_[size_t(i)]; }
  Eigen::Vector2d kappa(const LatticeBasis& lat, int i) const {
    return lat.dual(waves_[size_t(i)].x(), waves_[size_t(i)].y());
  }
  /// Index of (n1, n2), or -1 if outside the set.
  int index_of(long n1, long n2) const;

  bool closed_under_negation() const;
  bool closed_under_rotation() const;  // plain map n -> (-n2, n1 - n2)
  /// Affine rotation map about kstar: n -> (-n2, n1 - n2) + shift(kstar).
  /// Returns per-index image, or -1 where the image leaves the set.
  std::vector<int> rotation_permutation(KPoint kstar) const;

 private:
  int cutoff_ = 0;
  double c1_ = 0.0, c2_ = 0.0;  // hexagon center
  std::vector<Eigen::Vector2i> waves_;
  std::unordered_map<std::uint64_t, int> lookup_;

  static PlaneWaveBasis build(int cutoff, double c1, double c2);
};

/// Real-space periodic scalar field given by finitely many Fourier
/// coefficients c_kappa over the dual lattice, f(x) = sum c_kappa e^{i kappa.x}.
struct PeriodicScalarField {
  std::vector<Eigen::Vector2i> modes;   // integer dual coordinates
  std::vector<cdouble> coeffs;
  bool real_valued = false;
  bool even = false;
  bool r_invariant = false;

  cdouble coeff(long n1, long n2) const;
  cdouble eval(const LatticeBasis& lat, const Eigen::Vector2d& x) const;

  struct SymmetryResiduals {
    double conj = 0.0;  // |c_kappa - conj(c_{-kappa})|
    double even = 0.0;  // |c_kappa - c_{-kappa}|
    double rot = 0.0;   // |c_{R kappa} - c_kappa|
  };
  SymmetryResiduals symmetry_residuals() const;
};

enum class PotentialKind : std::uint8_t { Trig, GaussianWells };

/// Honeycomb field synthesis. Checks the real/even/R-invariance flags at
/// coefficient level (residual above 1e-12 is a construction bug and throws)
/// and reports whether the Fourier coefficient at 2*pi*(k1 + k2) is nonzero.
struct HoneycombField {
  PeriodicScalarField field;
  double coeff_k1_plus_k2 = 0.0;  // |c| at 2*pi*(k1+k2), nonzero for Dirac-point existence
};

HoneycombField synth_honeycomb_potential(PotentialKind kind, double amplitude,
                                         std::optional<double> width,
                                         const LatticeBasis& lat);

}  // namespace edgespec
