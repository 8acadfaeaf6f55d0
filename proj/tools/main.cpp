#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "stochblow/commands.hpp"

using namespace stochblow;

int main(int argc, char** argv) {
  CLI::App app{"Blow-up experiments for the stochastic semilinear heat equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool strict = false;
  std::vector<std::string> axes;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--out", out_dir, "Output directory (run directories are created below it)");
    cmd->add_option("--seed", seed, "Override ensemble.master_seed");
    cmd->add_option("--threads", threads, "Worker threads for ensembles")->check(CLI::Range(1u, 1024u));
    cmd->add_flag("--strict", strict, "Reject unknown config keys");
  };
  auto* criterion = app.add_subcommand("criterion", "Evaluate the blow-up criterion for the initial data");
  auto* simulate = app.add_subcommand("simulate", "Integrate one path and write its norm trajectory");
  auto* ensemble = app.add_subcommand("ensemble", "Monte Carlo estimate of the mean-square norm");
  auto* verify = app.add_subcommand("verify", "Run the oracle suite (energy balances, martingales, remainder)");
  auto* sweep = app.add_subcommand("sweep", "Criterion and blow-up outcomes over a parameter grid");
  for (auto* c : {criterion, simulate, ensemble, verify, sweep}) add_common(c);
  sweep->add_option("--axis", axes, "Sweep axis name=v1,v2,... (amplitude or noise_scale); repeatable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  ExperimentConfig config;
  CommandOptions options;
  try {
    config = load_config(config_path, strict);
    if (!out_dir.empty()) options.out_dir = out_dir;
    if (app.got_subcommand(sweep)) {
      for (const auto& a : axes) options.axes.push_back(parse_axis(a));
    }
    auto* active = app.get_subcommands().front();
    if (active->count("--seed")) options.seed = seed;
    if (active->count("--threads")) options.threads = threads;
    apply_overrides(config, options);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }
  for (const auto& w : config.warnings) std::cerr << "warning: " << w << "\n";

  try {
    CommandResult result;
    if (app.got_subcommand(criterion)) result = cmd_criterion(config);
    else if (app.got_subcommand(simulate)) result = cmd_simulate(config);
    else if (app.got_subcommand(ensemble)) result = cmd_ensemble(config);
    else if (app.got_subcommand(verify)) result = cmd_verify(config);
    else result = cmd_sweep(config);
    std::cout << result.summary;
    std::cout << "run directory: " << result.run_dir.string() << "\n";
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
