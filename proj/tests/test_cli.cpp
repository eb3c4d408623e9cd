#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cache.hpp"
#include "config.hpp"
#include "edgespec/export.hpp"
#include "runner.hpp"

using namespace edgespec;
using namespace edgespec::cli;

namespace {

std::string minimal_config() {
  return R"({
    "potential": {"kind": "trig", "amplitude": 10.0},
    "a_field": {"kind": "trig", "amplitude": 0.8},
    "edge": {"r": "0/1"}
  })";
}

std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("edgespec_test_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("validate_config: defaults injected, normalization") {
  RunConfig cfg = validate_config_text(minimal_config(), "wrap");
  CHECK(cfg.cutoff == 8);
  CHECK(cfg.m_max == 50);
  CHECK(cfg.eps == doctest::Approx(0.01));
  CHECK(cfg.wall == "tanh");
  CHECK(cfg.dirac1d.N_grid == 1024);
  CHECK(cfg.edge.is_rational());
  CHECK(cfg.edge.rational().a1 == 1);
  CHECK(cfg.edge.rational().b1 == 0);
  // canonical form round-trips every field with 17-digit floats
  const std::string c1 = cfg.canonical_json();
  RunConfig cfg2 = validate_config_text(minimal_config(), "wrap");
  CHECK(c1 == cfg2.canonical_json());
}

TEST_CASE("validate_config: rational parsing") {
  RunConfig cfg = validate_config_text(R"({
    "potential": {"kind": "trig", "amplitude": 10.0},
    "edge": {"r": "1/2"}
  })",
                                       "edge");
  CHECK(cfg.edge.rational().a1 == 2);
  CHECK(cfg.edge.rational().b1 == 1);
  // reducible fractions normalize to the coprime pair
  RunConfig cfg2 = validate_config_text(R"({
    "potential": {"kind": "trig", "amplitude": 10.0},
    "edge": {"r": "2/4"}
  })",
                                        "edge");
  CHECK(cfg2.edge.rational().a1 == 2);
  CHECK(cfg2.edge.rational().b1 == 1);
  // negative slope: sign carried by b1
  RunConfig cfg3 = validate_config_text(R"({
    "potential": {"kind": "trig", "amplitude": 10.0},
    "edge": {"r": "-1/3"}
  })",
                                        "wrap");
  CHECK(cfg3.edge.rational().a1 == 3);
  CHECK(cfg3.edge.rational().b1 == -1);
  // integer r stays exact-rational
  RunConfig cfg4 = validate_config_text(R"({
    "potential": {"kind": "trig", "amplitude": 10.0},
    "edge": {"r": 1}
  })",
                                        "edge");
  CHECK(cfg4.edge.rational().a1 == 1);
  CHECK(cfg4.edge.rational().b1 == 1);
}

TEST_CASE("validate_config: schema violations") {
  CHECK_THROWS_AS(validate_config_text("{}", "wrap"), ConfigError);
  CHECK_THROWS_AS(validate_config_text("not json", "wrap"), ConfigError);
  CHECK_THROWS_AS(validate_config_text(R"({"potential": {"kind": "trig", "amplitude": 0.0},
                                           "edge": {"r": 0}})",
                                       "wrap"),
                  ConfigError);
  CHECK_THROWS_AS(validate_config_text(R"({"potential": {"kind": "gaussian_wells",
                                           "amplitude": -9.0}, "edge": {"r": 0}})",
                                       "wrap"),
                  ConfigError);  // missing width
  CHECK_THROWS_AS(validate_config_text(minimal_config(), "no_such_subcommand"), ConfigError);
  // decimal r is fine for wrap but rejected for cylinder-backed subcommands
  const std::string dec = R"({
    "potential": {"kind": "trig", "amplitude": 10.0},
    "edge": {"r": 1.4142}
  })";
  CHECK_NOTHROW(validate_config_text(dec, "wrap"));
  for (const char* sub : {"edge", "compare", "wavepacket"}) {
    try {
      validate_config_text(dec, sub);
      CHECK(false);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("approximant") != std::string::npos);
    }
  }
}

TEST_CASE("CSV writer: RFC-4180 quoting and fixed float format") {
  CsvWriter csv({"name", "value"});
  csv.row({std::string("plain"), 1.5});
  csv.row({std::string("with,comma"), 2.0});
  csv.row({std::string("with\"quote"), 0.1});
  const std::string out = csv.str();
  CHECK(out.find("plain,1.5\n") != std::string::npos);
  CHECK(out.find("\"with,comma\",2\n") != std::string::npos);
  CHECK(out.find("\"with\"\"quote\",0.10000000000000001\n") != std::string::npos);
  CHECK(format_double(M_PI) == "3.1415926535897931");
}

TEST_CASE("Dirac cache: round-trip and version guard") {
  LatticeBasis lat = LatticeBasis::build();
  auto V = synth_honeycomb_potential(PotentialKind::Trig, 10.0, std::nullopt, lat).field;
  DiracPointData dp = detect_dirac_point(lat, V, KPoint::K, 4);
  const std::string blob = serialize_dirac_point(dp);
  DiracPointData back = deserialize_dirac_point(blob);
  CHECK(back.E_D == dp.E_D);
  CHECK(back.b_star == dp.b_star);
  CHECK(back.upsilon == dp.upsilon);
  CHECK((back.Phi1 - dp.Phi1).norm() == 0.0);
  CHECK((back.Phi2 - dp.Phi2).norm() == 0.0);

  const auto k1 = DiracCache::key(V, 6, KPoint::K);
  const auto k2 = DiracCache::key(V, 6, KPoint::Kp);
  const auto k3 = DiracCache::key(V, 8, KPoint::K);
  CHECK(k1 != k2);
  CHECK(k1 != k3);

  auto dir = temp_dir("cache");
  DiracCache cache(dir, true);
  CHECK(!cache.load(k1).has_value());
  cache.store(k1, dp);
  auto hit = cache.load(k1);
  REQUIRE(hit.has_value());
  CHECK(hit->E_D == dp.E_D);
  DiracCache disabled(dir, false);
  CHECK(!disabled.load(k1).has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("wrap subcommand: artifact matches enumerate_L_eps and reruns byte-identically") {
  RunConfig cfg = validate_config_text(R"({
    "potential": {"kind": "trig", "amplitude": 10.0},
    "edge": {"r": 1.4142135623730951},
    "eps": 0.01,
    "m_max": 50
  })",
                                       "wrap");
  auto out1 = temp_dir("wrap1");
  auto out2 = temp_dir("wrap2");
  cfg.out_dir = out1;
  REQUIRE(run("wrap", cfg) == 0);
  cfg.out_dir = out2;
  REQUIRE(run("wrap", cfg) == 0);
  const std::string csv1 = slurp(out1 / "wrap.csv");
  const std::string csv2 = slurp(out2 / "wrap.csv");
  CHECK(!csv1.empty());
  CHECK(csv1 == csv2);  // reproducibility: identical artifact bytes

  // file-level round trip against the library enumeration
  LatticeBasis lat = LatticeBasis::build();
  EdgeFrame f = EdgeFrame::build(lat, 1.4142135623730951);
  auto L = enumerate_L_eps(f, 0.01, 50);
  size_t lines = 0;
  for (char c : csv1)
    if (c == '\n') ++lines;
  CHECK(lines == L.size() + 1);  // header + one row per index
  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);
}

TEST_CASE("dirac subcommand: second run served from cache, byte-identical") {
  RunConfig cfg = validate_config_text(R"({
    "potential": {"kind": "trig", "amplitude": 10.0},
    "a_field": {"kind": "trig", "amplitude": 0.8},
    "cutoff": 4,
    "edge": {"r": "0/1"}
  })",
                                       "dirac");
  auto out1 = temp_dir("dirac1");
  auto out2 = temp_dir("dirac2");
  auto cachedir = temp_dir("dirac_cache");
  cfg.cache_dir = cachedir;
  cfg.out_dir = out1;
  REQUIRE(run("dirac", cfg) == 0);
  cfg.out_dir = out2;
  REQUIRE(run("dirac", cfg) == 0);
  CHECK(slurp(out1 / "dirac.json") == slurp(out2 / "dirac.json"));
  // the second manifest records the cache hit
  CHECK(slurp(out2 / "manifest.json").find("\"cache_hit\": [\n    true,\n    true\n  ]") !=
        std::string::npos);
  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);
  std::filesystem::remove_all(cachedir);
}
