#pragma once

#include "config.hpp"

namespace edgespec::cli {

/// Executes one subcommand, writing CSV/JSON artifacts plus manifest.json
/// into cfg.out_dir. Returns the process exit status: 0 on success; module
/// errors propagate as exceptions and are mapped to exit 1 by main.
int run(const std::string& subcommand, const RunConfig& cfg);

}  // namespace edgespec::cli
