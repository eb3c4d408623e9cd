#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgespec {

/// Fractional part with the floor convention, frac(x) = x - floor(x) in [0,1).
inline double frac(double x) { return x - std::floor(x); }

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// The equilateral triangular lattice, its dual, the Brillouin-zone vertices
/// K, K' = -K, and the clockwise 2*pi/3 rotation. All quantities are fixed
/// closed-form geometry; dual vectors are 2*pi*k1, 2*pi*k2.
struct LatticeBasis {
  Eigen::Vector2d v1, v2;   // lattice vectors, |v1 ^ v2| = 1
  Eigen::Vector2d k1, k2;   // dual basis, k_n . v_l = delta_nl
  Eigen::Vector2d K, Kp;    // Brillouin-zone vertices, Kp = -K
  Eigen::Matrix2d R;        // clockwise rotation by 2*pi/3, R^3 = Id
  double varsigma = 0.0;    // varsigma^2 = 2/sqrt(3)

  static LatticeBasis build();

  /// Dual-lattice vector 2*pi*(n1*k1 + n2*k2).
  Eigen::Vector2d dual(long n1, long n2) const {
    return 2.0 * M_PI * (double(n1) * k1 + double(n2) * k2);
  }

  /// k reduced modulo the dual lattice (coordinates rounded to the nearest
  /// cell); band energies are invariant under this reduction.
  Eigen::Vector2d reduce_dual(const Eigen::Vector2d& k) const {
    const double c1 = std::round(k.dot(v1) / (2.0 * M_PI));
    const double c2 = std::round(k.dot(v2) / (2.0 * M_PI));
    return k - dual(long(c1), long(c2));
  }
};

enum class KPoint : std::uint8_t { K, Kp };

inline const char* to_string(KPoint p) { return p == KPoint::K ? "K" : "K'"; }

/// Edge frame attached to the slope r: edge vector vhat1 = v1 + r*v2 and the
/// dual pair khat1 = k1, khat2 = -r*k1 + k2 with khat_n . vhat_l = delta_nl.
/// Also carries the 3D lifting vectors spanning the augmented interface.
struct EdgeFrame {
  LatticeBasis lattice;
  double r = 0.0;
  Eigen::Vector2d vhat1, vhat2, khat1, khat2;
  Eigen::Vector3d a1, a2, a_perp;

  static EdgeFrame build(const LatticeBasis& basis, double r);

  Eigen::Vector2d kstar(KPoint p) const {
    return p == KPoint::K ? lattice.K : lattice.Kp;
  }
};

/// Index into the countable family of wrapped segments, I = (Kstar, m).
struct WrapIndex {
  KPoint kstar = KPoint::K;
  long m = 0;

  friend bool operator==(const WrapIndex&, const WrapIndex&) = default;
  friend bool operator<(const WrapIndex& a, const WrapIndex& b) {
    if (a.kstar != b.kstar) return a.kstar < b.kstar;
    return a.m < b.m;
  }
};

/// Wrapping data for one index I: the segment center lambda_I, the transverse
/// offset gamma_I in [-pi, pi), and the dual-lattice translate ell_I with
/// exactly recoverable integer coordinates. Reconstruction identity:
///   K + lambda_I*khat2 = Kstar + gamma_I*khat1 + ell_I.
struct WrapData {
  WrapIndex index;
  double lambda = 0.0;
  double gamma = 0.0;
  Eigen::Vector2d ell = Eigen::Vector2d::Zero();
  Eigen::Vector2i ell_coords = Eigen::Vector2i::Zero();  // (n1, n2): ell = 2pi(n1 k1 + n2 k2)
  // Set when the frac argument sits within 1e-9 of an integer, where gamma
  // is discontinuous in m*r; the returned side is the lower-closed one.
  bool near_boundary = false;

  double gamma_tilde(double delta) const { return gamma / delta; }
};

/// Result of wrapping an arbitrary slice parameter lambda: the unique index,
/// the in-cell offset m_of_lambda = gamma_I*khat1 + (lambda - lambda_I)*khat2
/// with coordinates in [-pi, pi), and the dual-lattice translate.
struct WrapPoint {
  WrapIndex index;
  Eigen::Vector2d m_of_lambda = Eigen::Vector2d::Zero();
  Eigen::Vector2d ell = Eigen::Vector2d::Zero();
  Eigen::Vector2i ell_coords = Eigen::Vector2i::Zero();
  double y1 = 0.0, y2 = 0.0;  // khat-coordinates of m_of_lambda
};

WrapData wrap_data(const EdgeFrame& frame, WrapIndex index);
WrapPoint wrap_quasimomentum(const EdgeFrame& frame, KPoint kstar, double lambda);

/// All I = (Kstar, m) with |m| <= m_max and |gamma_I| <= eps, sorted by
/// (Kstar, m) with K before K'. Requires eps in (0, pi] and m_max >= 0.
std::vector<WrapData> enumerate_L_eps(const EdgeFrame& frame, double eps, long m_max);

enum class EdgeType : std::uint8_t { ZigzagType, ArmchairType };

/// Classification of the rational edge r = b1/a1 with coprime inputs,
/// convention (a1, b1) = (1, 0) for r = 0. Zigzag-type (a1 != b1 mod 3) edges
/// meet only the K sublattice; armchair-type edges meet both, the K' entries
/// at m in m0 + a1*Z.
struct EdgeClassification {
  EdgeType type = EdgeType::ZigzagType;
  long a1 = 1, b1 = 0;
  long a2 = 0, b2 = 0;  // Bezout pair, a1*b2 - a2*b1 = 1, minimal |a2|
  long c = 0;           // 2*(a1 - b1)/3 for armchair-type
  long m0 = 0;          // K' offset in [0, a1)
};

EdgeClassification classify_rational_edge(long a1, long b1);

/// min |gamma_(Kstar, m)| over 1 <= |m| <= M for each M in M_list
/// (increasing). The trivial index (K, 0), where gamma vanishes identically,
/// is excluded so the scan measures the nontrivial near-returns.
std::vector<std::pair<long, double>> kronecker_gap_scan(
    const EdgeFrame& frame, KPoint kstar, const std::vector<long>& M_list);

}  // namespace edgespec
