#include "edgespec/bloch.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "edgespec/parallel.hpp"

namespace edgespec {

int& worker_threads() {
  static int n = 1;
  return n;
}

namespace {

double wedge(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

Eigen::MatrixXcd assemble_bloch_hamiltonian(const LatticeBasis& lat,
                                            const Eigen::Vector2d& k,
                                            const PeriodicScalarField& V,
                                            const std::optional<BulkPerturbation>& pert,
                                            const PlaneWaveBasis& basis) {
  const int n = basis.dim();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  std::vector<Eigen::Vector2d> P(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) P[size_t(i)] = k + basis.kappa(lat, i);

  for (int i = 0; i < n; ++i) H(i, i) = P[size_t(i)].squaredNorm();

  for (size_t m = 0; m < V.modes.size(); ++m) {
    const Eigen::Vector2i d = V.modes[m];
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2i ni = basis.coords(i);
      const int j = basis.index_of(ni.x() - d.x(), ni.y() - d.y());
      if (j >= 0) H(i, j) += V.coeffs[m];
    }
  }

  if (pert && pert->a != nullptr && pert->delta != 0.0) {
    const PeriodicScalarField& a = *pert->a;
    for (size_t m = 0; m < a.modes.size(); ++m) {
      const Eigen::Vector2i d = a.modes[m];
      for (int i = 0; i < n; ++i) {
        const Eigen::Vector2i ni = basis.coords(i);
        const int j = basis.index_of(ni.x() - d.x(), ni.y() - d.y());
        if (j >= 0)
          H(i, j) += pert->delta * a.coeffs[m] *
                     cdouble(0.0, wedge(P[size_t(i)], P[size_t(j)]));
      }
    }
  }
  return H;
}

Eigen::MatrixXcd assemble_sigma2_coupling(const LatticeBasis& lat, const Eigen::Vector2d& k,
                                          const PeriodicScalarField& a,
                                          const PlaneWaveBasis& basis) {
  const int n = basis.dim();
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(n, n);
  std::vector<Eigen::Vector2d> P(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) P[size_t(i)] = k + basis.kappa(lat, i);
  for (size_t m = 0; m < a.modes.size(); ++m) {
    const Eigen::Vector2i d = a.modes[m];
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2i ni = basis.coords(i);
      const int j = basis.index_of(ni.x() - d.x(), ni.y() - d.y());
      if (j >= 0) W(i, j) += a.coeffs[m] * cdouble(0.0, wedge(P[size_t(i)], P[size_t(j)]));
    }
  }
  return W;
}

BlochEigensystem solve_bloch(const Eigen::MatrixXcd& H, const Eigen::Vector2d& k, int n_bands) {
  if (n_bands > H.rows()) throw Error("solve_bloch: n_bands exceeds basis dimension");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success) throw Error("solve_bloch: eigensolver failed to converge");
  BlochEigensystem out;
  out.k = k;
  out.energies = es.eigenvalues().head(n_bands);
  out.vectors = es.eigenvectors().leftCols(n_bands);
  for (int b = 0; b < n_bands; ++b) {
    const double r = (H * out.vectors.col(b) - out.energies(b) * out.vectors.col(b)).norm() /
                     (1.0 + std::abs(out.energies(b)));
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

DispersionSlice dispersion_slice(const LatticeBasis& lat, const PeriodicScalarField& V,
                                 const EdgeFrame& frame, const std::vector<double>& lambda_grid,
                                 int n_bands, const PlaneWaveBasis& basis) {
  DispersionSlice out;
  out.lambdas = lambda_grid;
  out.energies.resize(long(lambda_grid.size()), n_bands);
  parallel_for(lambda_grid.size(), [&](std::size_t i) {
    // fold to the fundamental dual cell so the wave set covers the point
    const Eigen::Vector2d k = lat.reduce_dual(lat.K + lambda_grid[i] * frame.khat2);
    auto H = assemble_bloch_hamiltonian(lat, k, V, std::nullopt, basis);
    auto es = solve_bloch(H, k, n_bands);
    out.energies.row(long(i)) = es.energies.transpose();
  });
  return out;
}

namespace {

double dist_to_high_symmetry(const LatticeBasis& lat, const Eigen::Vector2d& k) {
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 2; ++s) {
    const Eigen::Vector2d Ks = s == 0 ? lat.K : lat.Kp;
    for (int n1 = -2; n1 <= 2; ++n1)
      for (int n2 = -2; n2 <= 2; ++n2)
        best = std::min(best, (k - Ks - lat.dual(n1, n2)).norm());
  }
  return best;
}

}  // namespace

NoFoldReport nofold_scan(const LatticeBasis& lat, const PeriodicScalarField& V, double E_D,
                         int b_star, int grid_n, double eps, const PlaneWaveBasis& basis) {
  NoFoldReport rep;
  rep.grid_n = grid_n;
  rep.eps = eps;
  rep.annulus_eps0 = 3.0 * eps;

  struct Sample {
    double dist, gap;
    Eigen::Vector2d k;
  };
  std::vector<Sample> samples(size_t(grid_n) * size_t(grid_n));
  parallel_for(samples.size(), [&](std::size_t idx) {
    const int i = int(idx) / grid_n, j = int(idx) % grid_n;
    const Eigen::Vector2d k =
        2.0 * M_PI * ((double(i) / grid_n) * lat.k1 + (double(j) / grid_n) * lat.k2);
    const double d = dist_to_high_symmetry(lat, k);
    Sample s{d, std::numeric_limits<double>::infinity(), k};
    if (d >= eps) {
      auto H = assemble_bloch_hamiltonian(lat, k, V, std::nullopt, basis);
      auto es = solve_bloch(H, k, b_star + 1);
      s.gap = std::min(std::abs(es.energies(b_star - 1) - E_D),
                       std::abs(es.energies(b_star) - E_D));
    }
    samples[idx] = s;
  });

  rep.min_gap = std::numeric_limits<double>::infinity();
  double num = 0.0, den = 0.0;
  rep.C0 = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (s.dist < eps) continue;
    if (s.gap < rep.min_gap) {
      rep.min_gap = s.gap;
      rep.argmin_k = s.k;
    }
    if (s.dist <= rep.annulus_eps0) {  // annulus fit through the origin
      num += s.dist * s.gap;
      den += s.dist * s.dist;
    } else {
      rep.C0 = std::min(rep.C0, s.gap);
    }
  }
  rep.C1 = den > 0.0 ? num / den : 0.0;
  double rss = 0.0;
  long cnt = 0;
  for (const auto& s : samples) {
    if (s.dist < eps || s.dist > rep.annulus_eps0) continue;
    const double pred = rep.C1 * s.dist;
    rss += (s.gap - pred) * (s.gap - pred) / (pred * pred);
    ++cnt;
  }
  rep.fit_rel_residual = cnt ? std::sqrt(rss / double(cnt)) : 0.0;
  rep.pass = rep.min_gap > 0.0;
  return rep;
}

}  // namespace edgespec
