#pragma once

#include <functional>

#include "edgespec/dirac_point.hpp"

namespace edgespec {

using AugmentedFunction = std::function<cdouble(const Eigen::Vector2d&, double)>;
using SpinorLine = std::function<Eigen::Vector2cd(double)>;

/// Grid-level averaging operator T_I and its adjoint over the cell Omega:
///   (T_I F)(zeta)   = int_Omega conj(phi_I(x, zeta - khat2.x)) F(x, zeta - khat2.x) dx
///   (T_I* g)(x, s)  = phi_I(x, s)^T g(khat2.(x + s v2))
/// with phi_I(x, s) = e^{i(gamma_I khat1.x + (lambda_I + K.v2) s)} Phi^{K_I}(x),
/// plus the unitary dilation J_{delta,I} = U_delta T_I. Quadrature is tensor
/// Gauss-Legendre on the cell mapped from the unit square.
class CellAverager {
 public:
  CellAverager(const EdgeFrame& frame, const WrapData& wrap, const DiracPointData& dp,
               int quad_order = 40);

  Eigen::Vector2cd apply(const AugmentedFunction& F, double zeta) const;
  cdouble adjoint(const SpinorLine& g, const Eigen::Vector2d& x, double s) const;

  /// J_{delta,I} F at zeta: delta^{-1/2} (T_I F)(zeta / delta).
  Eigen::Vector2cd apply_scaled(const AugmentedFunction& F, double delta, double zeta) const;
  /// J*_{delta,I} g at (x, s): (T*_I U*_delta g)(x, s).
  cdouble adjoint_scaled(const SpinorLine& g, double delta, const Eigen::Vector2d& x,
                         double s) const;

  Eigen::Vector2cd phi(const Eigen::Vector2d& x, double s) const;
  int quad_order() const { return quad_order_; }

 private:
  EdgeFrame frame_;
  WrapData wrap_;
  const DiracPointData* dp_;
  int quad_order_;
  std::vector<double> nodes_, weights_;  // Gauss-Legendre on [0, 1]
};

}  // namespace edgespec
