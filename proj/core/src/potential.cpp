#include "edgespec/potential.hpp"

#include <cmath>

namespace edgespec {

namespace {

std::uint64_t pack(long n1, long n2) {
  return (std::uint64_t(std::uint32_t(std::int32_t(n1))) << 32) |
         std::uint64_t(std::uint32_t(std::int32_t(n2)));
}

}  // namespace

PlaneWaveBasis PlaneWaveBasis::build(int cutoff, double c1, double c2) {
  PlaneWaveBasis b;
  b.cutoff_ = cutoff;
  b.c1_ = c1;
  b.c2_ = c2;
  const double lim = double(cutoff) + 0.5;  // half-integer margin keeps centered sets symmetric
  const int span = cutoff + 2;
  for (int n1 = -span; n1 <= span; ++n1)
    for (int n2 = -span; n2 <= span; ++n2) {
      const double u1 = n1 - c1, u2 = n2 - c2;
      const double h = std::max({std::abs(u1), std::abs(u2), std::abs(u1 - u2)});
      if (h <= lim) b.waves_.emplace_back(n1, n2);
    }
  for (int i = 0; i < int(b.waves_.size()); ++i)
    b.lookup_[pack(b.waves_[size_t(i)].x(), b.waves_[size_t(i)].y())] = i;
  return b;
}

PlaneWaveBasis PlaneWaveBasis::hexagonal(int cutoff) { return build(cutoff, 0.0, 0.0); }

PlaneWaveBasis PlaneWaveBasis::dirac_centered(KPoint kstar, int cutoff) {
  // Affine rotation on coordinates: n -> (-n2, n1 - n2) + shift, with shift
  // (0, 1) at K and (0, -1) at K'. Its fixed point is the hexagon center.
  const double sgn = (kstar == KPoint::K) ? 1.0 : -1.0;
  return build(cutoff, -sgn / 3.0, sgn / 3.0);
}

int PlaneWaveBasis::index_of(long n1, long n2) const {
  auto it = lookup_.find(pack(n1, n2));
  return it == lookup_.end() ? -1 : it->second;
}

bool PlaneWaveBasis::closed_under_negation() const {
  for (const auto& n : waves_)
    if (index_of(-n.x(), -n.y()) < 0) return false;
  return true;
}

bool PlaneWaveBasis::closed_under_rotation() const {
  for (const auto& n : waves_)
    if (index_of(-n.y(), n.x() - n.y()) < 0) return false;
  return true;
}

std::vector<int> PlaneWaveBasis::rotation_permutation(KPoint kstar) const {
  const long sh = (kstar == KPoint::K) ? 1 : -1;
  std::vector<int> perm(waves_.size(), -1);
  for (size_t i = 0; i < waves_.size(); ++i) {
    const long n1 = waves_[i].x(), n2 = waves_[i].y();
    perm[i] = index_of(-n2, n1 - n2 + sh);
  }
  return perm;
}

cdouble PeriodicScalarField::coeff(long n1, long n2) const {
  for (size_t i = 0; i < modes.size(); ++i)
    if (modes[i].x() == n1 && modes[i].y() == n2) return coeffs[i];
  return {0.0, 0.0};
}

cdouble PeriodicScalarField::eval(const LatticeBasis& lat, const Eigen::Vector2d& x) const {
  cdouble acc{0.0, 0.0};
  for (size_t i = 0; i < modes.size(); ++i) {
    const Eigen::Vector2d kap = lat.dual(modes[i].x(), modes[i].y());
    acc += coeffs[i] * std::exp(cdouble(0.0, kap.dot(x)));
  }
  return acc;
}

PeriodicScalarField::SymmetryResiduals PeriodicScalarField::symmetry_residuals() const {
  SymmetryResiduals res;
  for (size_t i = 0; i < modes.size(); ++i) {
    const long n1 = modes[i].x(), n2 = modes[i].y();
    res.conj = std::max(res.conj, std::abs(coeffs[i] - std::conj(coeff(-n1, -n2))));
    res.even = std::max(res.even, std::abs(coeffs[i] - coeff(-n1, -n2)));
    // R kappa: (n1, n2) -> (-n2, n1 - n2)
    res.rot = std::max(res.rot, std::abs(coeff(-n2, n1 - n2) - coeffs[i]));
  }
  return res;
}

HoneycombField synth_honeycomb_potential(PotentialKind kind, double amplitude,
                                         std::optional<double> width,
                                         const LatticeBasis& lat) {
  if (amplitude == 0.0) throw Error("synth_honeycomb_potential: amplitude must be nonzero");
  PeriodicScalarField f;

  if (kind == PotentialKind::Trig) {
    // V0 * [cos(2pi k1.x) + cos(2pi k2.x) + cos(2pi (k1+k2).x)]
    const double half = 0.5 * amplitude;
    for (auto [n1, n2] : {std::pair<int, int>{1, 0}, {0, 1}, {1, 1}}) {
      f.modes.emplace_back(n1, n2);
      f.coeffs.emplace_back(half, 0.0);
      f.modes.emplace_back(-n1, -n2);
      f.coeffs.emplace_back(half, 0.0);
    }
  } else {
    if (!width || *width <= 0.0)
      throw Error("synth_honeycomb_potential: gaussian_wells requires width > 0");
    const double w = *width;
    // periodized wells at the two honeycomb sites +-(v1+v2)/3; the Fourier
    // coefficient of sum_{Lambda} exp(-|x - s|^2/w^2) at kappa is
    // pi*w^2*exp(-|kappa|^2 w^2/4)*e^{-i kappa.s} (|Omega| = 1)
    const Eigen::Vector2d site = (lat.v1 + lat.v2) / 3.0;
    const int span = int(std::ceil(8.0 / w / (2.0 * M_PI * lat.varsigma))) + 2;
    for (int n1 = -span; n1 <= span; ++n1)
      for (int n2 = -span; n2 <= span; ++n2) {
        const Eigen::Vector2d kap = lat.dual(n1, n2);
        const double mag = M_PI * w * w * std::exp(-kap.squaredNorm() * w * w / 4.0);
        const double c = amplitude * mag * 2.0 * std::cos(kap.dot(site));
        if (std::abs(c) < 1e-16 * std::abs(amplitude)) continue;
        f.modes.emplace_back(n1, n2);
        f.coeffs.emplace_back(c, 0.0);
      }
  }

  auto res = f.symmetry_residuals();
  if (res.conj > 1e-12 || res.even > 1e-12 || res.rot > 1e-12)
    throw Error("synth_honeycomb_potential: symmetry residual above 1e-12");
  f.real_valued = f.even = f.r_invariant = true;

  HoneycombField out;
  out.field = std::move(f);
  out.coeff_k1_plus_k2 = std::abs(out.field.coeff(1, 1));
  return out;
}

}  // namespace edgespec
