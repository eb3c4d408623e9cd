#include "cache.hpp"

#include <fstream>
#include <sstream>

#include "edgespec/export.hpp"
#include "json.hpp"

namespace edgespec::cli {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::uint64_t DiracCache::key(const PeriodicScalarField& V, int cutoff, KPoint kstar) {
  std::ostringstream ss;
  ss << kSolverVersion << '|' << cutoff << '|' << to_string(kstar) << '|';
  for (size_t i = 0; i < V.modes.size(); ++i)
    ss << V.modes[i].x() << ',' << V.modes[i].y() << ',' << format_double(V.coeffs[i].real())
       << ',' << format_double(V.coeffs[i].imag()) << ';';
  return fnv1a(ss.str());
}

std::string serialize_dirac_point(const DiracPointData& dp) {
  json j;
  j["version"] = kSolverVersion;
  j["kstar"] = dp.kstar == KPoint::K ? "K" : "Kp";
  j["E_D"] = format_double(dp.E_D);
  j["b_star"] = dp.b_star;
  j["cutoff"] = dp.basis.cutoff();
  j["upsilon"] = format_double(dp.upsilon);
  j["upsilon_fit"] = format_double(dp.upsilon_fit);
  j["upsilon_imag_residual"] = format_double(dp.upsilon_imag_residual);
  j["gap_estimate"] = format_double(dp.gap_estimate);
  if (dp.theta_coeff) j["theta_coeff"] = format_double(*dp.theta_coeff);
  json waves = json::array(), phi1 = json::array();
  for (int i = 0; i < dp.basis.dim(); ++i) {
    waves.push_back({dp.basis.coords(i).x(), dp.basis.coords(i).y()});
    phi1.push_back({format_double(dp.Phi1(i).real()), format_double(dp.Phi1(i).imag())});
  }
  j["waves"] = waves;
  j["phi1"] = phi1;
  return j.dump();
}

DiracPointData deserialize_dirac_point(const std::string& text) {
  json j = json::parse(text);
  if (j.value("version", "") != kSolverVersion) throw Error("cache: version mismatch");
  DiracPointData dp;
  dp.kstar = j.at("kstar").get<std::string>() == "K" ? KPoint::K : KPoint::Kp;
  dp.E_D = std::stod(j.at("E_D").get<std::string>());
  dp.b_star = j.at("b_star").get<int>();
  dp.basis = PlaneWaveBasis::dirac_centered(dp.kstar, j.at("cutoff").get<int>());
  dp.upsilon = std::stod(j.at("upsilon").get<std::string>());
  dp.upsilon_fit = std::stod(j.at("upsilon_fit").get<std::string>());
  dp.upsilon_imag_residual = std::stod(j.at("upsilon_imag_residual").get<std::string>());
  dp.gap_estimate = std::stod(j.at("gap_estimate").get<std::string>());
  if (j.contains("theta_coeff")) dp.theta_coeff = std::stod(j.at("theta_coeff").get<std::string>());
  const auto& waves = j.at("waves");
  if (int(waves.size()) != dp.basis.dim()) throw Error("cache: wave set mismatch");
  dp.Phi1.resize(dp.basis.dim());
  for (int i = 0; i < dp.basis.dim(); ++i) {
    if (waves[size_t(i)][0].get<int>() != dp.basis.coords(i).x() ||
        waves[size_t(i)][1].get<int>() != dp.basis.coords(i).y())
      throw Error("cache: wave ordering mismatch");
    dp.Phi1(i) = cdouble(std::stod(j.at("phi1")[size_t(i)][0].get<std::string>()),
                         std::stod(j.at("phi1")[size_t(i)][1].get<std::string>()));
  }
  dp.Phi2 = dp.Phi1.conjugate();
  return dp;
}

std::optional<DiracPointData> DiracCache::load(std::uint64_t key) const {
  if (!enabled_) return std::nullopt;
  const auto path = dir_ / (std::to_string(key) + ".json");
  std::ifstream f(path);
  if (!f) return std::nullopt;
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return deserialize_dirac_point(ss.str());
  } catch (const std::exception&) {
    return std::nullopt;  // stale or corrupt entry: recompute
  }
}

void DiracCache::store(std::uint64_t key, const DiracPointData& dp) const {
  if (!enabled_) return;
  std::filesystem::create_directories(dir_);
  write_text_file(dir_ / (std::to_string(key) + ".json"), serialize_dirac_point(dp));
}

}  // namespace edgespec::cli
