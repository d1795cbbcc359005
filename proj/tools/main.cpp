#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "biharm/cli.hpp"

namespace {

using biharm::cli::RunConfig;

int dispatch(const std::string& command, const RunConfig& config) {
  if (command == "eig") return biharm::cli::run_eig(config, std::cout);
  if (command == "hypotheses") return biharm::cli::run_hypotheses(config, std::cout);
  if (command == "continue") return biharm::cli::run_continuation(config, std::cout);
  if (command == "sweep") return biharm::cli::run_sweep(config, std::cout);
  return biharm::cli::run_hardy_sobolev(config, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete resonant biharmonic problem: spectra, exponent tables, continuation and sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  for (const char* name : {"eig", "hypotheses", "continue", "sweep", "hardy-sobolev"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key=value configuration file");
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : biharm::cli::kConfigError;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = biharm::cli::load_config(config_path);
  } catch (const biharm::cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return biharm::cli::kConfigError;
  }
  if (out_dir) config.out_dir = *out_dir;
  if (seed) config.seed = *seed;

  const std::string command = app.get_subcommands().front()->get_name();
  return dispatch(command, config);
}
