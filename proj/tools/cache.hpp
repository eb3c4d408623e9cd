#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "edgespec/dirac_point.hpp"

namespace edgespec::cli {

inline constexpr const char* kSolverVersion = "edgespec-0.1.0";

/// Content-hash cache of Dirac-point computations: the key hashes the
/// canonical serialization of (potential, cutoff, Kstar) plus the solver
/// version; a hit requires an exact match of both.
class DiracCache {
 public:
  DiracCache(std::filesystem::path dir, bool enabled) : dir_(std::move(dir)), enabled_(enabled) {}

  static std::uint64_t key(const PeriodicScalarField& V, int cutoff, KPoint kstar);

  std::optional<DiracPointData> load(std::uint64_t key) const;
  void store(std::uint64_t key, const DiracPointData& dp) const;
  bool enabled() const { return enabled_; }

 private:
  std::filesystem::path dir_;
  bool enabled_ = true;
};

std::string serialize_dirac_point(const DiracPointData& dp);
DiracPointData deserialize_dirac_point(const std::string& text);

}  // namespace edgespec::cli
