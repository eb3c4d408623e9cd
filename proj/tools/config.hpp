#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edgespec/cylinder.hpp"

namespace edgespec::cli {

struct ConfigError : Error {
  using Error::Error;
};

struct FieldSpec {
  std::string kind = "trig";  // trig | gaussian_wells
  double amplitude = 0.0;
  std::optional<double> width;
};

/// Edge slope: either an exact rational pair or a decimal (incommensurate).
struct EdgeSlope {
  std::variant<RationalEdge, double> value;

  bool is_rational() const { return std::holds_alternative<RationalEdge>(value); }
  double r() const {
    return is_rational() ? std::get<RationalEdge>(value).r() : std::get<double>(value);
  }
  const RationalEdge& rational() const { return std::get<RationalEdge>(value); }
};

struct Dirac1dConfig {
  double L = 0.0;  // 0 = auto from the decay length
  int N_grid = 1024;
  std::string scheme = "spectral";  // spectral | fd4
};

struct CylinderConfig {
  int N_t = 90;    // transverse cells at delta = 0.1, scaled as 1/delta
  int cutoff = 4;  // plane-wave shells on the cylinder
};

struct BandsConfig {
  double lambda_min = -M_PI, lambda_max = M_PI;
  int count = 121;
  int n_bands = 6;
};

struct NoFoldConfig {
  int grid = 200;
  double eps = 0.3;
};

struct RunConfig {
  FieldSpec potential;
  FieldSpec a_field;
  int cutoff = 8;
  EdgeSlope edge;
  std::vector<double> deltas{0.1};
  double mu = 0.0;
  long m_max = 50;
  double eps = 0.01;
  std::string wall = "tanh";
  Dirac1dConfig dirac1d;
  CylinderConfig cylinder;
  BandsConfig bands;
  NoFoldConfig nofold;
  std::filesystem::path out_dir = "out";
  std::filesystem::path cache_dir = ".edgespec-cache";
  bool use_cache = true;
  int threads = 1;

  std::string canonical_json() const;  // normalized, key-sorted, 17-digit floats
};

/// Loads, schema-validates and normalizes a config file; throws ConfigError
/// with a field-naming message on violations. `subcommand` gates the
/// edge-compatibility rules (cylinder runs need a rational slope).
RunConfig validate_config(const std::filesystem::path& path, const std::string& subcommand);
RunConfig validate_config_text(const std::string& text, const std::string& subcommand);

}  // namespace edgespec::cli
