#include "config.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "edgespec/export.hpp"
#include "json.hpp"

namespace edgespec::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kSubcommands{"bands",   "dirac",     "nofold",
                                            "wrap",    "dirac1d",   "blockspec",
                                            "wavepacket", "edge",   "compare"};

double require_positive(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError("config: " + field + " must be a number");
  const double v = j.get<double>();
  if (!(v > 0.0)) throw ConfigError("config: " + field + " must be positive");
  return v;
}

FieldSpec parse_field(const json& j, const std::string& name) {
  if (!j.is_object()) throw ConfigError("config: " + name + " must be an object");
  FieldSpec f;
  f.kind = j.value("kind", "trig");
  if (f.kind != "trig" && f.kind != "gaussian_wells")
    throw ConfigError("config: " + name + ".kind must be trig or gaussian_wells");
  if (!j.contains("amplitude")) throw ConfigError("config: " + name + ".amplitude is required");
  if (!j.at("amplitude").is_number())
    throw ConfigError("config: " + name + ".amplitude must be a number");
  f.amplitude = j.at("amplitude").get<double>();
  if (f.amplitude == 0.0) throw ConfigError("config: " + name + ".amplitude must be nonzero");
  if (j.contains("width") && !j.at("width").is_null()) {
    f.width = require_positive(j.at("width"), name + ".width");
  }
  if (f.kind == "gaussian_wells" && !f.width)
    throw ConfigError("config: " + name + " with kind gaussian_wells requires width");
  return f;
}

EdgeSlope parse_edge(const json& j) {
  EdgeSlope e;
  if (!j.is_object() || !j.contains("r")) throw ConfigError("config: edge.r is required");
  const json& r = j.at("r");
  if (r.is_string()) {
    const std::string s = r.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) {
        // integer slope written as a string is still exact-rational
        e.value = RationalEdge{1, std::stol(s)};
      } else {
        const long num = std::stol(s.substr(0, slash));
        long den = std::stol(s.substr(slash + 1));
        long b1 = num;
        if (den < 0) {
          den = -den;
          b1 = -b1;
        }
        if (den == 0) throw ConfigError("config: edge.r has zero denominator");
        const long g = std::gcd(std::abs(b1), den);
        e.value = RationalEdge{den / g, b1 / g};
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("config: edge.r string must be an integer or num/den");
    }
  } else if (r.is_number_integer()) {
    e.value = RationalEdge{1, r.get<long>()};
  } else if (r.is_number()) {
    e.value = r.get<double>();
  } else {
    throw ConfigError("config: edge.r must be a number or a \"num/den\" string");
  }
  return e;
}

}  // namespace

RunConfig validate_config_text(const std::string& text, const std::string& subcommand) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end())
    throw ConfigError("unknown subcommand: " + subcommand);

  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  RunConfig cfg;
  if (!j.contains("potential")) throw ConfigError("config: potential is required");
  cfg.potential = parse_field(j.at("potential"), "potential");
  if (j.contains("a_field")) cfg.a_field = parse_field(j.at("a_field"), "a_field");
  else cfg.a_field = FieldSpec{"trig", 1.0, std::nullopt};

  cfg.cutoff = j.value("cutoff", 8);
  if (cfg.cutoff < 2 || cfg.cutoff > 24) throw ConfigError("config: cutoff must be in [2, 24]");

  if (!j.contains("edge")) throw ConfigError("config: edge is required");
  cfg.edge = parse_edge(j.at("edge"));

  if (j.contains("delta")) {
    if (j.at("delta").is_number()) {
      cfg.deltas = {require_positive(j.at("delta"), "delta")};
    } else if (j.at("delta").is_array()) {
      cfg.deltas.clear();
      for (const auto& d : j.at("delta")) cfg.deltas.push_back(require_positive(d, "delta[]"));
    } else {
      throw ConfigError("config: delta must be a number or an array");
    }
  }
  cfg.mu = j.value("mu", 0.0);
  cfg.m_max = j.value("m_max", 50L);
  if (cfg.m_max < 0) throw ConfigError("config: m_max must be >= 0");
  cfg.eps = j.value("eps", 0.01);
  if (!(cfg.eps > 0.0 && cfg.eps <= M_PI)) throw ConfigError("config: eps must be in (0, pi]");
  cfg.wall = j.value("wall", "tanh");
  if (cfg.wall != "tanh") throw ConfigError("config: only the tanh wall is built in");

  if (j.contains("dirac1d")) {
    const json& d = j.at("dirac1d");
    cfg.dirac1d.L = d.value("L", 0.0);
    cfg.dirac1d.N_grid = d.value("N_grid", 1024);
    if (cfg.dirac1d.N_grid % 2 != 0) throw ConfigError("config: dirac1d.N_grid must be even");
    cfg.dirac1d.scheme = d.value("scheme", "spectral");
    if (cfg.dirac1d.scheme != "spectral" && cfg.dirac1d.scheme != "fd4")
      throw ConfigError("config: dirac1d.scheme must be spectral or fd4");
  }
  if (j.contains("cylinder")) {
    const json& c = j.at("cylinder");
    cfg.cylinder.N_t = c.value("N_t", 90);
    if (cfg.cylinder.N_t % 3 != 0) throw ConfigError("config: cylinder.N_t must be divisible by 3");
    cfg.cylinder.cutoff = c.value("cutoff", 4);
  }
  if (j.contains("bands")) {
    const json& b = j.at("bands");
    cfg.bands.lambda_min = b.value("lambda_min", -M_PI);
    cfg.bands.lambda_max = b.value("lambda_max", M_PI);
    cfg.bands.count = b.value("count", 121);
    cfg.bands.n_bands = b.value("n_bands", 6);
    if (cfg.bands.count < 2) throw ConfigError("config: bands.count must be >= 2");
  }
  if (j.contains("nofold")) {
    const json& nf = j.at("nofold");
    cfg.nofold.grid = nf.value("grid", 200);
    cfg.nofold.eps = nf.value("eps", 0.3);
  }
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("cache_dir")) cfg.cache_dir = j.at("cache_dir").get<std::string>();

  // cylinder-backed subcommands need an exact rational slope
  if ((subcommand == "edge" || subcommand == "compare" || subcommand == "wavepacket") &&
      !cfg.edge.is_rational())
    throw ConfigError(
        "config: subcommand '" + subcommand +
        "' requires an exact rational edge; write r as \"b1/a1\" (e.g. \"1/2\") or pass a "
        "rational approximant of the irrational slope");
  return cfg;
}

RunConfig validate_config(const std::filesystem::path& path, const std::string& subcommand) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return validate_config_text(ss.str(), subcommand);
}

std::string RunConfig::canonical_json() const {
  json j;
  auto field = [](const FieldSpec& f) {
    json o;
    o["kind"] = f.kind;
    o["amplitude"] = format_double(f.amplitude);
    if (f.width) o["width"] = format_double(*f.width);
    return o;
  };
  j["potential"] = field(potential);
  j["a_field"] = field(a_field);
  j["cutoff"] = cutoff;
  if (edge.is_rational()) {
    j["edge"] = {{"a1", edge.rational().a1}, {"b1", edge.rational().b1}};
  } else {
    j["edge"] = {{"r", format_double(edge.r())}};
  }
  json ds = json::array();
  for (double d : deltas) ds.push_back(format_double(d));
  j["delta"] = ds;
  j["mu"] = format_double(mu);
  j["m_max"] = m_max;
  j["eps"] = format_double(eps);
  j["wall"] = wall;
  j["dirac1d"] = {{"L", format_double(dirac1d.L)},
                  {"N_grid", dirac1d.N_grid},
                  {"scheme", dirac1d.scheme}};
  j["cylinder"] = {{"N_t", cylinder.N_t}, {"cutoff", cylinder.cutoff}};
  j["bands"] = {{"lambda_min", format_double(bands.lambda_min)},
                {"lambda_max", format_double(bands.lambda_max)},
                {"count", bands.count},
                {"n_bands", bands.n_bands}};
  j["nofold"] = {{"grid", nofold.grid}, {"eps", format_double(nofold.eps)}};
  return j.dump(2);
}

}  // namespace edgespec::cli
