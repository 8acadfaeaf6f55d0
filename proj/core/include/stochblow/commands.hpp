#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stochblow/config.hpp"

namespace stochblow {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitOracleFailure = 2, kExitRuntime = 3 };

struct CommandOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::vector<SweepAxis> axes;  // replaces the config's sweep axes when nonempty
};

struct CommandResult {
  int exit_code = kExitOk;
  std::filesystem::path run_dir;
  std::vector<std::filesystem::path> files;
  std::string summary;  // human-readable report
};

/// Applies command-line overrides (seed, threads, output directory, axes).
void apply_overrides(ExperimentConfig& config, const CommandOptions& options);

/// <output directory>/<config hash>.
std::filesystem::path run_directory(const ExperimentConfig& config);

// Every command writes under run_directory(config) and returns the files it
// produced. Library errors propagate as exceptions.
CommandResult cmd_criterion(const ExperimentConfig& config);
CommandResult cmd_simulate(const ExperimentConfig& config);
CommandResult cmd_ensemble(const ExperimentConfig& config);
CommandResult cmd_verify(const ExperimentConfig& config);
CommandResult cmd_sweep(const ExperimentConfig& config);

}  // namespace stochblow
