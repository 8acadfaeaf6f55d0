#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stochblow/energy.hpp"
#include "stochblow/ensemble.hpp"
#include "stochblow/integrator.hpp"
#include "stochblow/oracles.hpp"

namespace stochblow {

inline constexpr int kSchemaVersion = 1;

struct Violation {
  std::string location;  // dotted key path, e.g. "model.m"
  std::string message;
};

/// Thrown by load_config / parse_config with every violation found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Violation> violations);
  ConfigError(std::string location, std::string message);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

struct InitialSpec {
  std::string preset = "sine";  // c·sin(kπx/L)
  double amplitude = 0.0;
  int mode = 1;

  std::function<double(double)> function(double length) const;
};

struct NoiseSpec {
  std::string family = "additive";  // additive | multiplicative
  std::string preset = "none";      // additive: none | decaying_sine
  double sigma_amplitude = 0.0;
  double eta_amplitude = 0.0;
  double decay_rate = 1.0;
  int mode = 1;
  double decay_horizon = 50.0;
  // multiplicative
  double sigma = 0.0;
  std::string eta_profile = "constant";  // constant | linear | abs
  double eta_scale = 0.0;
};

struct LevySpec {
  std::string type = "none";  // none | atoms | truncated_stable
  std::vector<LevyAtom> atoms;
  TruncatedStable stable{1.0, 0.5, 0.1, 1.0};

  LevyMeasure build() const;
};

struct SweepAxis {
  std::string name;  // amplitude | noise_scale
  std::vector<double> values;
};

struct VerifySpec {
  std::size_t paths = 200;
  std::size_t martingale_streams = 10000;
  std::size_t theta_triples = 1000;
  double order_constant = kBalanceOrderConstant;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ModelParams model{};
  double length = 1.0;
  std::size_t nodes = 0;
  InitialSpec initial;
  NoiseSpec noise;
  LevySpec levy;
  StepScheme scheme{1e-4, JumpMode::fixed_grid, 0.5, 60};
  double threshold = 1e8;
  std::size_t paths = 100;
  std::uint64_t master_seed = 1;
  double horizon = 1.0;
  std::size_t record_stride = 10;
  unsigned threads = 1;
  double ms_threshold = 1e12;
  EigenvalueFlavor eigenvalue = EigenvalueFlavor::continuum;
  std::optional<double> k_override;
  std::vector<SweepAxis> sweep;
  VerifySpec verify;
  std::string output_directory = "out";
  bool svg = true;
  std::vector<std::string> warnings;

  IntervalGrid grid() const { return IntervalGrid(length, nodes); }
  /// Builds the problem; noise_scale multiplies σ and η.
  SpdeProblem problem(double noise_scale = 1.0) const;
  Field initial_field(const IntervalGrid& grid) const;
  EnsembleConfig ensemble_config() const;
  CriterionOptions criterion_options() const;

  /// Canonical JSON of every effective value (sorted keys). Execution-only
  /// fields (threads, output) are included on request.
  std::string effective_json(int indent = 2, bool with_execution = true) const;
  /// FNV-1a 64 of the canonical effective config without execution-only
  /// fields (threads, output), as 16 hex digits.
  std::string hash() const;
};

/// Parses the JSON config format. Unknown keys are errors when `strict`,
/// warnings (collected in ExperimentConfig::warnings) otherwise.
ExperimentConfig parse_config(std::string_view text, bool strict = false);
ExperimentConfig load_config(const std::filesystem::path& path, bool strict = false);

/// Parses "name=v1,v2,..." into a sweep axis; throws ConfigError.
SweepAxis parse_axis(std::string_view spec);

}  // namespace stochblow
