#include "edgespec/cylinder.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>

namespace edgespec {

namespace {

double wedge(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Periodized double wall on the window of W cells: the physical wall rises
// through u = 0 and a compensating mirror wall sits half a window away, so
// the coefficient is smooth and periodic. u = y2 + s. The image count is
// adaptive so the truncated sum is periodic to ~1e-12 even for small
// delta * W.
double periodized_wall(const DomainWall& wall, double delta, double W, double u) {
  const int images = 1 + int(std::ceil(14.0 / std::max(0.5, delta * W)));
  double acc = -1.0;
  for (int n = -images; n <= images; ++n)
    acc += wall.kappa(delta * (u - n * W)) - wall.kappa(delta * (u - (n + 0.5) * W));
  return acc;
}

std::vector<cdouble> wall_fourier_coefficients(const DomainWall& wall, double delta, int W,
                                               double s_shift, int& band) {
  // trapezoid quadrature of the smooth periodic wall; spectrally accurate
  const int M = std::max(512, 16 * W);
  std::vector<double> values(static_cast<size_t>(M));
  for (int i = 0; i < M; ++i) {
    const double y2 = W * (double(i) / M - 0.5);
    values[size_t(i)] = wall.is_wall ? periodized_wall(wall, delta, W, y2 + s_shift)
                                     : wall.kappa(delta * (y2 + s_shift));
  }
  const int l_cap = W;  // decay scale is delta*W/pi^2 cells; W is plenty
  std::vector<cdouble> coef(static_cast<size_t>(2 * l_cap + 1));
  double peak = 0.0;
  for (int l = -l_cap; l <= l_cap; ++l) {
    cdouble acc{0.0, 0.0};
    for (int i = 0; i < M; ++i) {
      const double y2 = W * (double(i) / M - 0.5);
      acc += values[size_t(i)] * std::exp(cdouble(0.0, -2.0 * M_PI * l * y2 / W));
    }
    coef[size_t(l + l_cap)] = acc / double(M);
    peak = std::max(peak, std::abs(coef[size_t(l + l_cap)]));
  }
  band = 0;
  for (int l = 0; l <= l_cap; ++l) {
    const double mag = std::max(std::abs(coef[size_t(l_cap + l)]), std::abs(coef[size_t(l_cap - l)]));
    if (mag > 1e-10 * std::max(1.0, peak)) band = l;
  }
  std::vector<cdouble> out(size_t(2 * band + 1));
  for (int l = -band; l <= band; ++l) out[size_t(l + band)] = coef[size_t(l + l_cap)];
  return out;
}

}  // namespace

CylinderProblem assemble_cylinder(const RationalEdge& edge, const LatticeBasis& lat,
                                  double k_par, double delta, double s_shift, int N_t,
                                  int cutoff, const PeriodicScalarField& V,
                                  const PeriodicScalarField& a, const DomainWall& wall,
                                  bool build_matrix) {
  if (edge.a1 <= 0) throw IncommensurateInput("assemble_cylinder: a1 must be positive");
  classify_rational_edge(edge.a1, edge.b1);  // validates coprimality
  if (N_t % 3 != 0)
    throw Error("assemble_cylinder: N_t must be divisible by 3 (K offsets on the grid)");

  CylinderProblem pb;
  pb.edge = edge;
  pb.frame = EdgeFrame::build(lat, edge.r());
  pb.k_par = k_par;
  pb.delta = delta;
  pb.s_shift = s_shift;
  pb.N_t = N_t;
  pb.cutoff = cutoff;

  CylinderBasis& bs = pb.basis;
  bs.a1 = edge.a1;
  bs.W = N_t;
  bs.k_par = k_par;
  const double kt = double(edge.a1) * k_par;
  bs.q0 = (2.0 * M_PI * frac(kt / (2.0 * M_PI) + 0.5) - M_PI) / double(edge.a1);
  bs.Nn = int(cutoff * edge.a1) + 1;
  pb.wall_fourier = wall_fourier_coefficients(wall, delta, N_t, s_shift, pb.wall_band);
  bs.Nj = int(std::ceil((double(cutoff) + 1.0 / 3.0) * N_t)) + pb.wall_band + 2;

  for (size_t m = 0; m < V.modes.size(); ++m)
    pb.v_couplings.push_back({V.modes[m].x() * edge.a1 + V.modes[m].y() * edge.b1,
                              V.modes[m].y() * long(bs.W), V.coeffs[m]});
  if (delta != 0.0)
    for (size_t m = 0; m < a.modes.size(); ++m)
      pb.a_couplings.push_back({a.modes[m].x() * edge.a1 + a.modes[m].y() * edge.b1,
                                a.modes[m].y() * long(bs.W), a.coeffs[m]});

  if (!build_matrix) return pb;

  const int dim = bs.dim();
  std::vector<Eigen::Triplet<cdouble>> trip;
  const size_t nnz_estimate =
      size_t(dim) *
      (1 + V.modes.size() + pb.a_couplings.size() * size_t(2 * pb.wall_band + 1));
  trip.reserve(nnz_estimate);

  // cache the 2D momenta
  std::vector<Eigen::Vector2d> P(static_cast<size_t>(dim));
  for (int n = -bs.Nn; n <= bs.Nn; ++n)
    for (int j = -bs.Nj; j <= bs.Nj; ++j)
      P[size_t(bs.index(n, j))] = bs.qn(n) * pb.frame.khat1 + bs.tj(j) * pb.frame.khat2;

  for (int i = 0; i < dim; ++i) trip.emplace_back(i, i, cdouble(P[size_t(i)].squaredNorm(), 0.0));

  // potential couplings: kappa_m = 2 pi (p k1 + q k2) shifts (n, j) by
  // (p a1 + q b1, q W)
  for (const auto& c : pb.v_couplings) {
    for (int n = -bs.Nn; n <= bs.Nn; ++n) {
      if (!((-bs.Nn <= n + c.dn) && (n + c.dn <= bs.Nn))) continue;
      for (int j = -bs.Nj; j <= bs.Nj; ++j) {
        if (!((-bs.Nj <= j + c.dj) && (j + c.dj <= bs.Nj))) continue;
        trip.emplace_back(bs.index(int(n + c.dn), int(j + c.dj)), bs.index(n, j), c.coef);
      }
    }
  }

  // domain-wall sigma_2 coupling: -delta * w_l * a_m * P'.sigma_2.P
  for (const auto& c : pb.a_couplings) {
    for (int l = -pb.wall_band; l <= pb.wall_band; ++l) {
      const cdouble w = c.coef * pb.wall_fourier[size_t(l + pb.wall_band)];
      if (std::abs(w) < 1e-14) continue;
      const long dj = c.dj + l;
      for (int n = -bs.Nn; n <= bs.Nn; ++n) {
        if (!((-bs.Nn <= n + c.dn) && (n + c.dn <= bs.Nn))) continue;
        for (int j = -bs.Nj; j <= bs.Nj; ++j) {
          if (!((-bs.Nj <= j + dj) && (j + dj <= bs.Nj))) continue;
          const int row = bs.index(int(n + c.dn), int(j + dj)), col = bs.index(n, j);
          // P_row . sigma_2 P_col = -i (P_row ^ P_col)
          const double wx = wedge(P[size_t(row)], P[size_t(col)]);
          trip.emplace_back(row, col, delta * w * cdouble(0.0, wx));
        }
      }
    }
  }

  pb.H.resize(dim, dim);
  pb.H.setFromTriplets(trip.begin(), trip.end());
  pb.H.makeCompressed();

  // Hermiticity spot check on a band of rows
  Eigen::SparseMatrix<cdouble> Hh = Eigen::SparseMatrix<cdouble>(pb.H.adjoint()) - pb.H;
  pb.hermiticity_residual = 0.0;
  for (int k = 0; k < Hh.outerSize(); ++k)
    for (Eigen::SparseMatrix<cdouble>::InnerIterator it(Hh, k); it; ++it)
      pb.hermiticity_residual = std::max(pb.hermiticity_residual, std::abs(it.value()));
  return pb;
}

Eigen::VectorXcd CylinderProblem::apply(const Eigen::VectorXcd& c) const {
  const CylinderBasis& bs = basis;
  if (c.size() != bs.dim()) throw Error("CylinderProblem::apply: dimension mismatch");
  Eigen::VectorXcd y(bs.dim());
  // kinetic diagonal
  for (int n = -bs.Nn; n <= bs.Nn; ++n) {
    const double qn = bs.qn(n);
    for (int j = -bs.Nj; j <= bs.Nj; ++j) {
      const Eigen::Vector2d P = qn * frame.khat1 + bs.tj(j) * frame.khat2;
      const int i = bs.index(n, j);
      y(i) = P.squaredNorm() * c(i);
    }
  }
  for (const auto& cp : v_couplings) {
    for (int n = -bs.Nn; n <= bs.Nn; ++n) {
      if (!((-bs.Nn <= n + cp.dn) && (n + cp.dn <= bs.Nn))) continue;
      for (int j = -bs.Nj; j <= bs.Nj; ++j) {
        if (!((-bs.Nj <= j + cp.dj) && (j + cp.dj <= bs.Nj))) continue;
        y(bs.index(int(n + cp.dn), int(j + cp.dj))) += cp.coef * c(bs.index(n, j));
      }
    }
  }
  for (const auto& cp : a_couplings) {
    for (int l = -wall_band; l <= wall_band; ++l) {
      const cdouble w = delta * cp.coef * wall_fourier[size_t(l + wall_band)];
      if (std::abs(w) < 1e-16) continue;
      const long dj = cp.dj + l;
      for (int n = -bs.Nn; n <= bs.Nn; ++n) {
        if (!((-bs.Nn <= n + cp.dn) && (n + cp.dn <= bs.Nn))) continue;
        const double qn = bs.qn(n), qr = bs.qn(int(n + cp.dn));
        for (int j = -bs.Nj; j <= bs.Nj; ++j) {
          if (!((-bs.Nj <= j + dj) && (j + dj <= bs.Nj))) continue;
          // (P_row ^ P_col) with P = q khat1 + t khat2 and khat1 ^ khat2 = -1
          const double wx = -(qr * bs.tj(j) - bs.tj(int(j + dj)) * qn);
          y(bs.index(int(n + cp.dn), int(j + dj))) += w * cdouble(0.0, wx) * c(bs.index(n, j));
        }
      }
    }
  }
  return y;
}

namespace {

struct TransverseProfile {
  double participation = 0.0;
  double center = 0.0;
};

TransverseProfile transverse_profile(const CylinderBasis& bs, const Eigen::VectorXcd& v) {
  // cell-resolved transverse mass; 4 samples per cell are enough for the
  // participation ratio and the circular center
  const int samples_per_cell = 4;
  const int G = bs.W * samples_per_cell;
  std::vector<double> cell_mass(size_t(bs.W), 0.0);
  Eigen::VectorXcd layer(bs.n_modes());
  for (int g = 0; g < G; ++g) {
    const double y2 = bs.W * (double(g) / G - 0.5);
    layer.setZero();
    for (int j = -bs.Nj; j <= bs.Nj; ++j) {
      const cdouble ph = std::exp(cdouble(0.0, bs.tj(j) * y2));
      for (int n = -bs.Nn; n <= bs.Nn; ++n) layer(n + bs.Nn) += v(bs.index(n, j)) * ph;
    }
    cell_mass[size_t(g / samples_per_cell)] += layer.squaredNorm();
  }
  double total = 0.0, sq = 0.0;
  cdouble circ{0.0, 0.0};
  for (int c = 0; c < bs.W; ++c) {
    total += cell_mass[size_t(c)];
    sq += cell_mass[size_t(c)] * cell_mass[size_t(c)];
    const double ang = 2.0 * M_PI * (double(c) + 0.5) / bs.W - M_PI;
    circ += cell_mass[size_t(c)] * std::exp(cdouble(0.0, ang));
  }
  TransverseProfile out;
  out.participation = total * total / sq;
  out.center = std::arg(circ) / (2.0 * M_PI) * bs.W;  // in [-W/2, W/2)
  return out;
}

// Shift-invert Lanczos with full reorthogonalization and deflation against
// already-converged vectors. The LU factorization is computed once per
// problem and shared across deflated restarts.
struct LanczosResult {
  std::vector<double> values;
  std::vector<Eigen::VectorXcd> vectors;
};

LanczosResult shift_invert_lanczos(const Eigen::SparseMatrix<cdouble>& H,
                                   const Eigen::SparseLU<Eigen::SparseMatrix<cdouble>>& lu,
                                   double sigma, double window_theta_min, int want,
                                   int max_iter, double eig_tol,
                                   const std::vector<Eigen::VectorXcd>& deflate,
                                   unsigned seed) {
  const int n = int(H.rows());
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = cdouble(nd(rng), nd(rng));
  auto orthogonalize = [&](Eigen::VectorXcd& w, const std::vector<Eigen::VectorXcd>& basis) {
    for (const auto& b : basis) w -= b.dot(w) * b;
  };
  orthogonalize(v, deflate);
  v.normalize();

  std::vector<Eigen::VectorXcd> V;
  std::vector<double> alpha, beta;
  Eigen::VectorXcd w;
  const int m_max = std::min(max_iter, n);
  int m = 0;
  for (int it = 0; it < m_max; ++it) {
    V.push_back(v);
    w = lu.solve(v);
    orthogonalize(w, deflate);
    const double a = std::real(v.dot(w));
    alpha.push_back(a);
    w -= a * v;
    if (it > 0) w -= beta.back() * V[size_t(it - 1)];
    // full reorthogonalization (twice for safety)
    orthogonalize(w, V);
    orthogonalize(w, V);
    const double b = w.norm();
    m = it + 1;
    if (b < 1e-13) break;
    beta.push_back(b);
    v = w / b;

    // periodically stop once every window Ritz pair has eigenvalue error
    // well below eig_tol; the A^{-1}-residual beta |y_m| bounds |d theta|,
    // and |dE| = |d theta| / theta^2
    if (m >= 24 && m % 8 == 0) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[size_t(i)];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[size_t(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      bool all_done = true;
      int in_window = 0;
      for (int i = 0; i < m; ++i) {
        const double theta = es.eigenvalues()(i);
        if (std::abs(theta) < window_theta_min) continue;
        ++in_window;
        const double dE = beta.back() * std::abs(es.eigenvectors()(m - 1, i)) / (theta * theta);
        if (dE > 0.05 * eig_tol) all_done = false;
      }
      if (in_window > 0 && all_done) break;
    }
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha[size_t(i)];
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[size_t(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

  LanczosResult out;
  std::vector<std::pair<double, int>> order;  // largest |theta| first
  for (int i = 0; i < m; ++i) order.emplace_back(-std::abs(es.eigenvalues()(i)), i);
  std::sort(order.begin(), order.end());
  const double beta_last = beta.empty() ? 0.0 : beta.back();
  for (const auto& [negabs, idx] : order) {
    if (int(out.values.size()) >= want) break;
    const double theta = es.eigenvalues()(idx);
    if (std::abs(theta) < 1e-12) continue;
    const double dE = (int(beta.size()) >= m ? beta_last * std::abs(es.eigenvectors()(m - 1, idx))
                                             : 0.0) /
                      (theta * theta);
    if (dE > eig_tol) continue;
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < m; ++i) x += es.eigenvectors()(i, idx) * V[size_t(i)];
    x.normalize();
    // Rayleigh refinement of the eigenvalue
    const double E = std::real(x.dot(H * x));
    out.values.push_back(E);
    out.vectors.push_back(std::move(x));
  }
  return out;
}

}  // namespace

std::vector<EdgeEigenpair> edge_spectrum(const CylinderProblem& problem,
                                         const SpectrumWindow& window, int max_pairs) {
  std::vector<Eigen::VectorXcd> converged;
  std::vector<double> values;
  const double eig_tol = 1e-9 * std::max(1.0, std::abs(window.center));

  Eigen::SparseMatrix<cdouble> A = problem.H;
  for (int i = 0; i < A.rows(); ++i) A.coeffRef(i, i) -= window.center;
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<cdouble>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw Error("edge_spectrum: factorization failed (shift hits an eigenvalue?)");

  for (int round = 0; round < 4; ++round) {
    LanczosResult res =
        shift_invert_lanczos(problem.H, lu, window.center, 1.0 / window.half_width, max_pairs,
                             160, eig_tol, converged, 1234u + 17u * unsigned(round));
    size_t added = 0;
    for (size_t i = 0; i < res.values.size(); ++i) {
      if (std::abs(res.values[i] - window.center) > window.half_width) continue;
      bool dup = false;
      for (size_t c = 0; c < converged.size(); ++c)
        if (std::abs(converged[c].dot(res.vectors[i])) > 0.5) dup = true;
      if (dup) continue;
      converged.push_back(res.vectors[i]);
      values.push_back(res.values[i]);
      ++added;
    }
    if (added == 0) break;
  }

  // Near-degenerate clusters (physical wall vs its window mirror) come out
  // as hybridized mixtures whose splitting is the mirror tunneling scale;
  // rotate each cluster to extremal mirror-side mass so the localization
  // diagnostics classify pure states, and report Rayleigh quotients for the
  // rotated vectors.
  {
    std::vector<int> order(values.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return values[size_t(a)] < values[size_t(b)]; });
    const double cluster_tol = std::max(1e-6 * std::max(1.0, std::abs(window.center)),
                                        0.02 * window.half_width);
    const CylinderBasis& bs = problem.basis;
    size_t i = 0;
    while (i < order.size()) {
      size_t j = i + 1;
      while (j < order.size() &&
             values[size_t(order[j])] - values[size_t(order[j - 1])] < cluster_tol)
        ++j;
      const int k = int(j - i);
      if (k > 1) {
        // mirror-side indicator in mode space: weight by transverse position
        // via the profile of each pairwise product is costly; use the grid
        // profile of the half-window around the mirror
        const double wall_center = -problem.s_shift;
        const int G = bs.W;  // one sample per cell is enough for the split
        Eigen::MatrixXcd layers(k, G);
        for (int c = 0; c < k; ++c) {
          const Eigen::VectorXcd& v = converged[size_t(order[i + size_t(c)])];
          for (int g = 0; g < G; ++g) {
            const double y2 = bs.W * (double(g) / G - 0.5);
            cdouble acc{0.0, 0.0};
            for (int jj = -bs.Nj; jj <= bs.Nj; ++jj) {
              const cdouble ph = std::exp(cdouble(0.0, bs.tj(jj) * y2));
              for (int n = -bs.Nn; n <= bs.Nn; ++n) acc += v(bs.index(n, jj)) * ph;
            }
            layers(c, g) = acc;
          }
        }
        Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(k, k);
        for (int g = 0; g < G; ++g) {
          const double y2 = bs.W * (double(g) / G - 0.5);
          double d = std::fmod(std::abs(y2 - wall_center), double(bs.W));
          d = std::min(d, bs.W - d);
          if (d < 0.25 * bs.W) continue;  // keep only the mirror side
          for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q) B(p, q) += std::conj(layers(p, g)) * layers(q, g);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> bsolve(B);
        std::vector<Eigen::VectorXcd> rotated(static_cast<size_t>(k));
        for (int c = 0; c < k; ++c) {
          Eigen::VectorXcd w = Eigen::VectorXcd::Zero(converged[0].size());
          for (int p = 0; p < k; ++p)
            w += bsolve.eigenvectors()(p, c) * converged[size_t(order[i + size_t(p)])];
          rotated[size_t(c)] = w.normalized();
        }
        for (int c = 0; c < k; ++c) {
          const int idx = order[i + size_t(c)];
          converged[size_t(idx)] = rotated[size_t(c)];
          values[size_t(idx)] =
              std::real(rotated[size_t(c)].dot(problem.H * rotated[size_t(c)]));
        }
      }
      i = j;
    }
  }

  std::vector<EdgeEigenpair> out;
  const double wall_center = -problem.s_shift;  // kappa(delta(y2 + s)) crosses 0 at y2 = -s
  for (size_t i = 0; i < values.size(); ++i) {
    TransverseProfile pr = transverse_profile(problem.basis, converged[i]);
    EdgeEigenpair e;
    e.E = values[i];
    e.participation_cells = pr.participation;
    e.center = pr.center;
    double d = std::fmod(std::abs(pr.center - wall_center), double(problem.N_t));
    d = std::min(d, problem.N_t - d);
    e.dist_from_wall = d;
    e.localized = pr.participation < 0.3 * problem.N_t;
    e.at_main_wall = d < 0.25 * problem.N_t;
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(),
            [](const EdgeEigenpair& a, const EdgeEigenpair& b) { return a.E < b.E; });
  return out;
}

Eigen::VectorXd dense_spectrum(const CylinderProblem& problem) {
  if (problem.basis.dim() > 4200) throw Error("dense_spectrum: basis too large");
  Eigen::MatrixXcd Hd = Eigen::MatrixXcd(problem.H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hd);
  return es.eigenvalues();
}

ComparisonTable compare_to_effective(const RationalEdge& edge, const LatticeBasis& lat,
                                     const std::vector<double>& deltas, double mu,
                                     const EffectiveModel& model, int N_t_at_delta0p1,
                                     int cutoff, const PeriodicScalarField& V,
                                     const PeriodicScalarField& a, const DomainWall& wall,
                                     double match_tol) {
  const EdgeClassification cls = classify_rational_edge(edge.a1, edge.b1);
  const EdgeFrame frame = EdgeFrame::build(lat, edge.r());
  const double k2n = frame.khat2.norm();

  ComparisonTable table;
  std::map<int, std::vector<std::pair<double, double>>> per_branch;  // j -> (delta, err)
  for (double delta : deltas) {
    // predictions, merged across sublattices that share them
    std::vector<BranchPrediction> preds;
    auto add_branch = [&](KPoint p) {
      const auto it = model.base_z.find(p);
      if (it == model.base_z.end()) throw Error("compare_to_effective: missing base_z");
      DiracSpectrum s = closed_form_spectrum(it->second, mu, model.upsilon, model.theta, k2n);
      for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
        const double E = model.E_D + delta * s.eigenvalues[i];
        const int j = int(i) - s.N;
        bool merged = false;
        for (auto& pr : preds)
          if (std::abs(pr.E - E) < 1e-12 && pr.j == j) {
            pr.branches.push_back(p);
            merged = true;
          }
        if (!merged) preds.push_back(BranchPrediction{E, {p}, j});
      }
    };
    add_branch(KPoint::K);
    if (cls.type == EdgeType::ArmchairType) add_branch(KPoint::Kp);

    for (size_t i = 0; i < preds.size(); ++i)
      for (size_t l = i + 1; l < preds.size(); ++l)
        if (std::abs(preds[i].E - preds[l].E) > 1e-12 &&
            std::abs(preds[i].E - preds[l].E) < match_tol)
          throw BranchMatchingAmbiguous("compare_to_effective: predictions closer than tolerance");

    const double k_par = lat.K.dot(frame.vhat1) + delta * mu;
    const int N_t = int(std::lround(N_t_at_delta0p1 * 0.1 / delta / 3.0)) * 3;
    CylinderProblem pb =
        assemble_cylinder(edge, lat, k_par, delta, 0.0, N_t, cutoff, V, a, wall);
    const double gap = delta * std::abs(model.theta);
    auto spec = edge_spectrum(pb, SpectrumWindow{model.E_D, 1.3 * gap});

    for (const auto& e : spec) {
      if (!e.localized || !e.at_main_wall) continue;
      if (std::abs(e.E - model.E_D) > 0.995 * gap) continue;
      const BranchPrediction* best = nullptr;
      for (const auto& pr : preds)
        if (!best || std::abs(pr.E - e.E) < std::abs(best->E - e.E)) best = &pr;
      if (!best) continue;
      ComparisonRow row;
      row.delta = delta;
      row.E_numerical = e.E;
      row.E_predicted = best->E;
      row.error = std::abs(e.E - best->E);
      row.j = best->j;
      for (size_t bi = 0; bi < best->branches.size(); ++bi)
        row.branch += std::string(bi ? "|" : "") + to_string(best->branches[bi]);
      table.rows.push_back(row);
      per_branch[best->j].emplace_back(delta, row.error);
    }
  }

  for (auto& [j, pts] : per_branch) {
    // keep the worst error per delta (conservative) and fit the order
    std::map<double, double> worst;
    for (auto& [d, e] : pts) worst[d] = std::max(worst.count(d) ? worst[d] : 0.0, e);
    if (worst.size() >= 2) {
      const auto lo = *worst.begin();     // smallest delta
      const auto hi = *worst.rbegin();    // largest delta
      if (lo.second > 0.0 && hi.second > 0.0)
        table.fitted_order[j] = std::log(hi.second / lo.second) / std::log(hi.first / lo.first);
    }
  }
  return table;
}

KparPeriodicityReport kpar_periodicity_check(const RationalEdge& edge, const LatticeBasis& lat,
                                             double k_par, double delta, double s_shift,
                                             int N_t, int cutoff,
                                             const PeriodicScalarField& V,
                                             const PeriodicScalarField& a,
                                             const DomainWall& wall,
                                             const SpectrumWindow& window) {
  KparPeriodicityReport rep;
  rep.k_par = k_par;
  rep.shift = 2.0 * M_PI / double(edge.a1);
  // the fiber spectra are exactly 2pi/a1-periodic in k_par, so every
  // eigenvalue well inside the window must match between the two runs
  auto run = [&](double kp) {
    CylinderProblem pb = assemble_cylinder(edge, lat, kp, delta, s_shift, N_t, cutoff, V, a, wall);
    auto spec = edge_spectrum(pb, window);
    std::vector<double> vals;
    for (const auto& e : spec)
      if (std::abs(e.E - window.center) < 0.8 * window.half_width) vals.push_back(e.E);
    std::sort(vals.begin(), vals.end());
    return vals;
  };
  rep.spec_base = run(k_par);
  rep.spec_shifted = run(k_par + rep.shift);
  const size_t n = std::min(rep.spec_base.size(), rep.spec_shifted.size());
  rep.max_deviation = rep.spec_base.size() == rep.spec_shifted.size()
                          ? 0.0
                          : std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i)
    rep.max_deviation =
        std::max(rep.max_deviation, std::abs(rep.spec_base[i] - rep.spec_shifted[i]));
  return rep;
}

}  // namespace edgespec
