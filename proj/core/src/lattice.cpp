#include "edgespec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edgespec {

LatticeBasis LatticeBasis::build() {
  LatticeBasis b;
  b.varsigma = std::sqrt(2.0 / std::sqrt(3.0));
  const double s = b.varsigma;
  const double h = std::sqrt(3.0) / 2.0;
  b.v1 << s * h, s * 0.5;
  b.v2 << s * h, -s * 0.5;
  b.k1 << s * 0.5, s * h;
  b.k2 << s * 0.5, -s * h;
  b.K = (2.0 * M_PI / 3.0) * (b.k1 - b.k2);
  b.Kp = -b.K;
  b.R << -0.5, h, -h, -0.5;
  return b;
}

EdgeFrame EdgeFrame::build(const LatticeBasis& basis, double r) {
  if (!std::isfinite(r)) throw Error("EdgeFrame: slope r must be finite");
  EdgeFrame f;
  f.lattice = basis;
  f.r = r;
  f.vhat1 = basis.v1 + r * basis.v2;
  f.vhat2 = basis.v2;
  f.khat1 = basis.k1;
  f.khat2 = -r * basis.k1 + basis.k2;
  f.a1 << basis.v1, r;
  f.a2 << basis.v2, -1.0;
  f.a_perp << 0.0, 0.0, 1.0;
  return f;
}

namespace {

constexpr double kBoundaryGuard = 1e-9;

// Solve y + 2*pi*n = a with y in [-pi, pi), n integer (unique).
struct CellSplit {
  double y;
  long n;
  bool near_boundary;
};

CellSplit split_half_open(double a) {
  const double x = a / (2.0 * M_PI) + 0.5;
  const double f = frac(x);
  CellSplit out;
  out.y = 2.0 * M_PI * f - M_PI;
  out.n = static_cast<long>(std::floor(x));
  out.near_boundary = std::abs(x - std::round(x)) < kBoundaryGuard;
  return out;
}

}  // namespace

WrapData wrap_data(const EdgeFrame& frame, WrapIndex index) {
  const LatticeBasis& lat = frame.lattice;
  const Eigen::Vector2d Ks = frame.kstar(index.kstar);
  WrapData w;
  w.index = index;
  w.lambda = (Ks - lat.K).dot(frame.vhat2) + 2.0 * M_PI * double(index.m);
  const double a = (lat.K - Ks).dot(frame.vhat1) - 2.0 * M_PI * double(index.m) * frame.r;
  const CellSplit s = split_half_open(a);
  w.gamma = s.y;
  w.near_boundary = s.near_boundary;
  w.ell_coords << int(s.n), int(index.m);
  w.ell = lat.dual(s.n, index.m);
  return w;
}

WrapPoint wrap_quasimomentum(const EdgeFrame& frame, KPoint kstar, double lambda) {
  const LatticeBasis& lat = frame.lattice;
  const Eigen::Vector2d Ks = frame.kstar(kstar);
  const CellSplit s2 = split_half_open((lat.K - Ks).dot(frame.vhat2) + lambda);
  const CellSplit s1 =
      split_half_open((lat.K - Ks).dot(frame.vhat1) - 2.0 * M_PI * double(s2.n) * frame.r);
  WrapPoint out;
  out.index = WrapIndex{kstar, s2.n};
  out.y1 = s1.y;
  out.y2 = s2.y;
  out.m_of_lambda = s1.y * frame.khat1 + s2.y * frame.khat2;
  out.ell_coords << int(s1.n), int(s2.n);
  out.ell = lat.dual(s1.n, s2.n);
  return out;
}

std::vector<WrapData> enumerate_L_eps(const EdgeFrame& frame, double eps, long m_max) {
  if (!(eps > 0.0 && eps <= M_PI)) throw Error("enumerate_L_eps: eps must be in (0, pi]");
  if (m_max < 0) throw Error("enumerate_L_eps: m_max must be >= 0");
  std::vector<WrapData> out;
  for (KPoint p : {KPoint::K, KPoint::Kp}) {
    for (long m = -m_max; m <= m_max; ++m) {
      WrapData w = wrap_data(frame, WrapIndex{p, m});
      if (std::abs(w.gamma) <= eps) out.push_back(w);
    }
  }
  return out;
}

namespace {

// Extended Euclid: returns (g, s, t) with a*s + b*t = g = gcd(a, b).
struct Bezout {
  long g, s, t;
};

Bezout ext_gcd(long a, long b) {
  if (b == 0) return {a, 1, 0};
  Bezout r = ext_gcd(b, a % b);
  return {r.g, r.t, r.s - (a / b) * r.t};
}

long mod_positive(long x, long n) {
  long m = x % n;
  return m < 0 ? m + n : m;
}

}  // namespace

EdgeClassification classify_rational_edge(long a1, long b1) {
  if (a1 <= 0) throw Error("classify_rational_edge: a1 must be positive");
  if (ext_gcd(a1, std::abs(b1)).g != 1)
    throw Error("classify_rational_edge: a1, b1 must be coprime");

  EdgeClassification cls;
  cls.a1 = a1;
  cls.b1 = b1;
  // a1*b2 - a2*b1 = 1; a2 is determined mod a1, pick the representative of
  // minimal absolute value (ties to the positive side), then b2 follows.
  Bezout sol = ext_gcd(a1, std::abs(b1));
  long a2 = (b1 >= 0) ? -sol.t : sol.t;
  a2 = mod_positive(a2, a1);
  if (2 * a2 > a1) a2 -= a1;
  long b2 = (b1 == 0) ? 1 : (1 + a2 * b1) / a1;
  cls.a2 = a2;
  cls.b2 = b2;

  if (mod_positive(a1 - b1, 3) != 0) {
    cls.type = EdgeType::ZigzagType;
    return cls;
  }
  cls.type = EdgeType::ArmchairType;
  cls.c = 2 * (a1 - b1) / 3;
  // Solutions of m*b1 + n*a1 = c are m = -c*a2 (mod a1); this is the offset
  // of the K' entries of L(eps), independent of the Bezout representative.
  cls.m0 = mod_positive(-cls.c * a2, a1);
  return cls;
}

std::vector<std::pair<long, double>> kronecker_gap_scan(
    const EdgeFrame& frame, KPoint kstar, const std::vector<long>& M_list) {
  if (!std::is_sorted(M_list.begin(), M_list.end()))
    throw Error("kronecker_gap_scan: M_list must be increasing");
  std::vector<std::pair<long, double>> out;
  out.reserve(M_list.size());
  double best = std::numeric_limits<double>::infinity();
  long m_done = 0;  // m = 0 excluded at K: gamma_(K,0) = 0 identically
  for (long M : M_list) {
    for (long m = m_done + 1; m <= M; ++m) {
      best = std::min(best, std::abs(wrap_data(frame, WrapIndex{kstar, m}).gamma));
      best = std::min(best, std::abs(wrap_data(frame, WrapIndex{kstar, -m}).gamma));
    }
    m_done = std::max(m_done, M);
    out.emplace_back(M, best);
  }
  return out;
}

}  // namespace edgespec
