#include <iostream>

#include "CLI11.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"edgespec: spectra of honeycomb Schrodinger operators with a line defect"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  bool no_cache = false;

  std::vector<CLI::App*> subs;
  for (const char* name : {"bands", "dirac", "nofold", "wrap", "dirac1d", "blockspec",
                           "wavepacket", "edge", "compare"}) {
    CLI::App* s = app.add_subcommand(name);
    s->add_option("--config", config_path, "run configuration file (JSON)")->required();
    s->add_option("--out", out_dir, "output directory (overrides config)");
    s->add_option("--threads", threads, "worker threads for scan loops");
    s->add_flag("--no-cache", no_cache, "bypass the Dirac-point cache");
    subs.push_back(s);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    edgespec::cli::RunConfig cfg = edgespec::cli::validate_config(config_path, sub);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.threads = threads;
    cfg.use_cache = !no_cache;
    return edgespec::cli::run(sub, cfg);
  } catch (const edgespec::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
