#include "runner.hpp"

#include <chrono>
#include <iostream>

#include "cache.hpp"
#include "edgespec/averaging.hpp"
#include "edgespec/export.hpp"
#include "edgespec/parallel.hpp"
#include "edgespec/wavepacket.hpp"
#include "json.hpp"

namespace edgespec::cli {

using nlohmann::json;

namespace {

struct Workbench {
  LatticeBasis lat = LatticeBasis::build();
  RunConfig cfg;
  std::string subcommand;
  PeriodicScalarField V, a;
  EdgeFrame frame;
  json manifest;
  std::vector<std::string> artifacts;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  explicit Workbench(const RunConfig& c, std::string sub) : cfg(c), subcommand(std::move(sub)) {
    V = synth_honeycomb_potential(
            cfg.potential.kind == "trig" ? PotentialKind::Trig : PotentialKind::GaussianWells,
            cfg.potential.amplitude, cfg.potential.width, lat)
            .field;
    a = synth_honeycomb_potential(
            cfg.a_field.kind == "trig" ? PotentialKind::Trig : PotentialKind::GaussianWells,
            cfg.a_field.amplitude, cfg.a_field.width, lat)
            .field;
    frame = EdgeFrame::build(lat, cfg.edge.r());
    std::filesystem::create_directories(cfg.out_dir);
    manifest["subcommand"] = subcommand;
    manifest["version"] = kSolverVersion;
    manifest["inputs"] = json::parse(cfg.canonical_json());
  }

  DiracPointData dirac(KPoint kstar, bool* cache_hit = nullptr) {
    DiracCache cache(cfg.cache_dir, cfg.use_cache);
    const auto key = DiracCache::key(V, cfg.cutoff, kstar);
    if (auto hit = cache.load(key)) {
      if (cache_hit) *cache_hit = true;
      return *hit;
    }
    if (cache_hit) *cache_hit = false;
    DiracPointData dp = detect_dirac_point(lat, V, kstar, cfg.cutoff);
    compute_theta(lat, a, dp);
    cache.store(key, dp);
    return dp;
  }

  void emit(const std::string& name, const std::string& content) {
    write_text_file(cfg.out_dir / name, content);
    artifacts.push_back(name);
  }

  void finish() {
    const auto dt = std::chrono::steady_clock::now() - t0;
    manifest["artifacts"] = artifacts;
    // timings live only in the manifest; data artifacts stay byte-reproducible
    manifest["elapsed_seconds"] =
        double(std::chrono::duration_cast<std::chrono::milliseconds>(dt).count()) / 1000.0;
    write_text_file(cfg.out_dir / "manifest.json", manifest.dump(2) + "\n");
  }

  DomainWall wall() const { return DomainWall::tanh_wall(); }

  double dirac1d_window(double theta, double upsilon) const {
    if (cfg.dirac1d.L > 0.0) return cfg.dirac1d.L;
    const double rate = std::abs(theta) / (std::abs(upsilon) * frame.khat2.norm());
    return 30.0 / std::min(1.0, rate);
  }
};

int run_wrap(Workbench& wb) {
  auto L = enumerate_L_eps(wb.frame, wb.cfg.eps, wb.cfg.m_max);
  CsvWriter csv({"kstar", "m", "lambda", "gamma", "ell_n1", "ell_n2"});
  for (const auto& w : L)
    csv.row({std::string(to_string(w.index.kstar)), w.index.m, w.lambda, w.gamma,
             long(w.ell_coords.x()), long(w.ell_coords.y())});
  wb.emit("wrap.csv", csv.str());
  wb.manifest["count"] = L.size();
  return 0;
}

int run_bands(Workbench& wb) {
  const auto& b = wb.cfg.bands;
  std::vector<double> grid(size_t(b.count));
  for (int i = 0; i < b.count; ++i)
    grid[size_t(i)] = b.lambda_min + (b.lambda_max - b.lambda_min) * double(i) / (b.count - 1);
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(wb.cfg.cutoff);
  DispersionSlice slice = dispersion_slice(wb.lat, wb.V, wb.frame, grid, b.n_bands, basis);
  std::vector<std::string> header{"lambda"};
  for (int n = 1; n <= b.n_bands; ++n) header.push_back("E_" + std::to_string(n));
  CsvWriter csv(header);
  for (size_t i = 0; i < grid.size(); ++i) {
    std::vector<CsvCell> row{grid[i]};
    for (int n = 0; n < b.n_bands; ++n) row.emplace_back(slice.energies(long(i), n));
    csv.row(row);
  }
  wb.emit("bands.csv", csv.str());
  return 0;
}

int run_dirac(Workbench& wb) {
  bool hitK = false, hitKp = false;
  DiracPointData dpK = wb.dirac(KPoint::K, &hitK);
  DiracPointData dpKp = wb.dirac(KPoint::Kp, &hitKp);
  json out;
  for (auto* dp : {&dpK, &dpKp}) {
    json d;
    d["E_D"] = format_double(dp->E_D);
    d["b_star"] = dp->b_star;
    d["upsilon"] = format_double(dp->upsilon);
    d["upsilon_fit"] = format_double(dp->upsilon_fit);
    d["gap_estimate"] = format_double(dp->gap_estimate);
    if (dp->theta_coeff) d["theta"] = format_double(*dp->theta_coeff);
    out[dp->kstar == KPoint::K ? "K" : "Kp"] = d;
  }
  wb.emit("dirac.json", out.dump(2) + "\n");
  wb.manifest["cache_hit"] = json::array({hitK, hitKp});
  return 0;
}

int run_nofold(Workbench& wb) {
  DiracPointData dp = wb.dirac(KPoint::K);
  PlaneWaveBasis basis = PlaneWaveBasis::hexagonal(std::min(wb.cfg.cutoff, 5));
  NoFoldReport rep = nofold_scan(wb.lat, wb.V, dp.E_D, dp.b_star, wb.cfg.nofold.grid,
                                 wb.cfg.nofold.eps, basis);
  json out;
  out["min_gap"] = format_double(rep.min_gap);
  out["pass"] = rep.pass;
  out["argmin_k"] = {format_double(rep.argmin_k.x()), format_double(rep.argmin_k.y())};
  out["C0"] = format_double(rep.C0);
  out["C1"] = format_double(rep.C1);
  out["annulus_eps0"] = format_double(rep.annulus_eps0);
  out["fit_rel_residual"] = format_double(rep.fit_rel_residual);
  out["grid"] = rep.grid_n;
  out["eps"] = format_double(rep.eps);
  wb.emit("nofold.json", out.dump(2) + "\n");
  return 0;
}

int run_dirac1d(Workbench& wb) {
  DiracPointData dp = wb.dirac(KPoint::K);
  DiracOperatorSpec spec = DiracOperatorSpec::build(dp, wb.frame, 0.0, wb.wall());
  const double L = wb.dirac1d_window(spec.theta, spec.v);
  Dirac1dOptions opt;
  opt.scheme =
      wb.cfg.dirac1d.scheme == "spectral" ? DzScheme::FourierSpectral : DzScheme::CentralDiff4;
  opt.keep_eigenfunctions = false;
  CsvWriter csv({"mu_hat", "theta_gap", "j", "z"});
  const double mu_hat = wb.cfg.mu;
  for (double m : {0.0, mu_hat}) {
    DiracOperatorSpec s = spec;
    s.mu_hat = m;
    DiracSpectrum sp = solve_dirac_1d(s, L, wb.cfg.dirac1d.N_grid, opt);
    for (size_t i = 0; i < sp.eigenvalues.size(); ++i)
      csv.row({m, sp.theta_gap, long(int(i) - sp.N), sp.eigenvalues[i]});
    if (m == mu_hat && mu_hat == 0.0) break;
  }
  wb.emit("dirac1d.csv", csv.str());
  return 0;
}

int run_blockspec(Workbench& wb) {
  DiracPointData dp = wb.dirac(KPoint::K);
  DiracOperatorSpec spec = DiracOperatorSpec::build(dp, wb.frame, 0.0, wb.wall());
  const double L = wb.dirac1d_window(spec.theta, spec.v);
  Dirac1dOptions opt;
  opt.keep_eigenfunctions = false;
  DiracSpectrum base = solve_dirac_1d(spec, L, wb.cfg.dirac1d.N_grid, opt);
  BlockSpectrumSample sample =
      sample_block_spectrum(wb.cfg.mu, wb.cfg.deltas.front(), wb.cfg.m_max, base.eigenvalues,
                            spec.v, spec.theta, wb.frame);
  CsvWriter csv({"kstar", "m", "gamma", "mu_hat", "j", "z", "in_gap"});
  for (const auto& e : sample.entries) {
    const int N = (int(e.z.size()) - 1) / 2;
    for (size_t i = 0; i < e.z.size(); ++i)
      csv.row({std::string(to_string(e.index.kstar)), e.index.m, e.gamma, e.mu_hat,
               long(int(i) - N), e.z[i], long(e.in_gap[i])});
  }
  wb.emit("blockspec.csv", csv.str());
  wb.manifest["theta_gap"] = format_double(sample.theta_gap);
  return 0;
}

int run_edge(Workbench& wb) {
  DiracPointData dp = wb.dirac(KPoint::K);
  const RationalEdge& edge = wb.cfg.edge.rational();
  const double delta = wb.cfg.deltas.front();
  const double k_par = wb.lat.K.dot(wb.frame.vhat1) + delta * wb.cfg.mu;
  const int N_t = std::max(3, int(std::lround(wb.cfg.cylinder.N_t * 0.1 / delta / 3.0)) * 3);
  CylinderProblem pb = assemble_cylinder(edge, wb.lat, k_par, delta, 0.0, N_t,
                                         wb.cfg.cylinder.cutoff, wb.V, wb.a, wb.wall());
  const double gap = delta * std::abs(dp.theta_coeff.value_or(1.0));
  auto spec = edge_spectrum(pb, SpectrumWindow{dp.E_D, 1.5 * gap});
  CsvWriter csv({"E", "participation_cells", "center", "dist_from_wall", "localized",
                 "at_main_wall"});
  for (const auto& e : spec)
    csv.row({e.E, e.participation_cells, e.center, e.dist_from_wall, long(e.localized),
             long(e.at_main_wall)});
  wb.emit("edge.csv", csv.str());
  wb.manifest["k_par"] = format_double(k_par);
  wb.manifest["N_t"] = N_t;
  wb.manifest["dim"] = pb.basis.dim();
  return 0;
}

int run_compare(Workbench& wb) {
  DiracPointData dpK = wb.dirac(KPoint::K);
  DiracPointData dpKp = wb.dirac(KPoint::Kp);
  const RationalEdge& edge = wb.cfg.edge.rational();
  DiracOperatorSpec specK = DiracOperatorSpec::build(dpK, wb.frame, 0.0, wb.wall());
  const double L = wb.dirac1d_window(specK.theta, specK.v);
  Dirac1dOptions opt;
  opt.keep_eigenfunctions = false;
  DiracSpectrum baseK = solve_dirac_1d(specK, L, wb.cfg.dirac1d.N_grid, opt);
  DiracOperatorSpec specKp = DiracOperatorSpec::build(dpKp, wb.frame, 0.0, wb.wall());
  DiracSpectrum baseKp = solve_dirac_1d(specKp, L, wb.cfg.dirac1d.N_grid, opt);

  EffectiveModel model;
  model.E_D = dpK.E_D;
  model.upsilon = std::abs(dpK.upsilon);
  model.theta = *dpK.theta_coeff;
  model.base_z[KPoint::K] = baseK.eigenvalues;
  model.base_z[KPoint::Kp] = baseKp.eigenvalues;

  ComparisonTable table = compare_to_effective(
      edge, wb.lat, wb.cfg.deltas, wb.cfg.mu, model, wb.cfg.cylinder.N_t,
      wb.cfg.cylinder.cutoff, wb.V, wb.a, wb.wall(), 1e-4);

  CsvWriter csv({"delta", "E_numerical", "E_predicted", "error", "j", "branch"});
  for (const auto& r : table.rows)
    csv.row({r.delta, r.E_numerical, r.E_predicted, r.error, long(r.j), r.branch});
  wb.emit("compare.csv", csv.str());
  json orders;
  for (const auto& [j, o] : table.fitted_order) orders[std::to_string(j)] = format_double(o);
  wb.manifest["fitted_order"] = orders;
  return 0;
}

int run_wavepacket(Workbench& wb) {
  DiracPointData dp = wb.dirac(KPoint::K);
  const double delta = wb.cfg.deltas.front();
  DiracOperatorSpec spec =
      DiracOperatorSpec::build(dp, wb.frame, wb.cfg.mu, wb.wall());
  const double L = wb.dirac1d_window(spec.theta, spec.v);
  DiracSpectrum sol = solve_dirac_1d(spec, L, wb.cfg.dirac1d.N_grid);
  EdgeWavepacket wp = build_wavepacket(WrapIndex{KPoint::K, 0}, 0, wb.cfg.mu, delta, dp,
                                       wb.frame, spec, sol);

  // structured grid export: JSON header + CSV payload of |Psi| samples
  const int nx = 48, ns = 33;
  json header;
  header["energy"] = format_double(wp.energy());
  header["k_par"] = format_double(wp.k_par());
  header["grid"] = {{"n_along", nx}, {"n_transverse", ns}};
  header["payload"] = "wavepacket.csv";
  wb.emit("wavepacket.json", header.dump(2) + "\n");
  CsvWriter csv({"y1", "y2", "re", "im", "abs"});
  for (int i = 0; i < nx; ++i)
    for (int l = 0; l < ns; ++l) {
      const double y1 = 4.0 * double(i) / nx;
      const double y2 = (double(l) / (ns - 1) - 0.5) * 2.0 / (delta);
      const Eigen::Vector2d x = y1 * wb.frame.vhat1 + y2 * wb.frame.vhat2;
      const cdouble v = wp.eval_restriction(x);
      csv.row({y1, y2, v.real(), v.imag(), std::abs(v)});
    }
  wb.emit("wavepacket.csv", csv.str());

  if (wb.cfg.edge.is_rational()) {
    ResidualOptions ropt;
    ropt.cutoff = wb.cfg.cylinder.cutoff;
    ResidualReport rr = dw_residual(wp, wb.cfg.edge.rational(), wb.lat, wb.V, wb.a, wb.wall(), ropt);
    wb.manifest["relative_residual"] = format_double(rr.relative_residual);
    wb.manifest["residual_N_t"] = rr.N_t;
  }
  return 0;
}

}  // namespace

int run(const std::string& subcommand, const RunConfig& cfg) {
  Workbench wb(cfg, subcommand);
  worker_threads() = cfg.threads;
  int rc = 0;
  if (subcommand == "wrap") rc = run_wrap(wb);
  else if (subcommand == "bands") rc = run_bands(wb);
  else if (subcommand == "dirac") rc = run_dirac(wb);
  else if (subcommand == "nofold") rc = run_nofold(wb);
  else if (subcommand == "dirac1d") rc = run_dirac1d(wb);
  else if (subcommand == "blockspec") rc = run_blockspec(wb);
  else if (subcommand == "edge") rc = run_edge(wb);
  else if (subcommand == "compare") rc = run_compare(wb);
  else if (subcommand == "wavepacket") rc = run_wavepacket(wb);
  else throw ConfigError("unknown subcommand: " + subcommand);
  wb.finish();
  return rc;
}

}  // namespace edgespec::cli
