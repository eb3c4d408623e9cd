#include "edgespec/averaging.hpp"

#include <cmath>

namespace edgespec {

namespace {

// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration on Legendre
// polynomials (standard Golub-Welsch-free construction, fine for n <= 128).
void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(size_t(n), 0.0);
  w.assign(size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[size_t(i)] = 0.5 * (1.0 + t);
    w[size_t(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

CellAverager::CellAverager(const EdgeFrame& frame, const WrapData& wrap,
                           const DiracPointData& dp, int quad_order)
    : frame_(frame), wrap_(wrap), dp_(&dp), quad_order_(quad_order) {
  gauss_legendre_unit(quad_order_, nodes_, weights_);
}

Eigen::Vector2cd CellAverager::phi(const Eigen::Vector2d& x, double s) const {
  const LatticeBasis& lat = frame_.lattice;
  const cdouble ph = std::exp(
      cdouble(0.0, wrap_.gamma * frame_.khat1.dot(x) + (wrap_.lambda + lat.K.dot(lat.v2)) * s));
  const Eigen::Vector2d Ks = dp_->kstar_vec(lat);
  cdouble b1{0.0, 0.0}, b2{0.0, 0.0};
  for (int i = 0; i < dp_->basis.dim(); ++i) {
    const cdouble e = std::exp(cdouble(0.0, (Ks + dp_->basis.kappa(lat, i)).dot(x)));
    b1 += dp_->Phi1(i) * e;
    b2 += dp_->Phi2(i) * e;
  }
  return {ph * b1, ph * b2};
}

Eigen::Vector2cd CellAverager::apply(const AugmentedFunction& F, double zeta) const {
  // cell Omega = {u1 v1 + u2 v2}, |v1 ^ v2| = 1 so dx = du1 du2
  Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
  for (int i = 0; i < quad_order_; ++i)
    for (int l = 0; l < quad_order_; ++l) {
      const Eigen::Vector2d x =
          nodes_[size_t(i)] * frame_.lattice.v1 + nodes_[size_t(l)] * frame_.lattice.v2;
      const double s = zeta - frame_.khat2.dot(x);
      const Eigen::Vector2cd ph = phi(x, s);
      const cdouble f = F(x, s);
      const double w = weights_[size_t(i)] * weights_[size_t(l)];
      acc(0) += w * std::conj(ph(0)) * f;
      acc(1) += w * std::conj(ph(1)) * f;
    }
  return acc;
}

cdouble CellAverager::adjoint(const SpinorLine& g, const Eigen::Vector2d& x, double s) const {
  const Eigen::Vector2cd ph = phi(x, s);
  const Eigen::Vector2cd gv = g(frame_.khat2.dot(x) + s);  // khat2.(x + s v2), khat2.v2 = 1
  return ph(0) * gv(0) + ph(1) * gv(1);
}

Eigen::Vector2cd CellAverager::apply_scaled(const AugmentedFunction& F, double delta,
                                            double zeta) const {
  return apply(F, zeta / delta) / std::sqrt(delta);
}

cdouble CellAverager::adjoint_scaled(const SpinorLine& g, double delta, const Eigen::Vector2d& x,
                                     double s) const {
  auto g_scaled = [&](double z) { return std::sqrt(delta) * g(delta * z); };  // U*_delta g
  return adjoint(g_scaled, x, s);
}

}  // namespace edgespec
