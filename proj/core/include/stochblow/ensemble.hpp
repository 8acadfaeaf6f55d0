#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stochblow/integrator.hpp"

namespace stochblow {

struct EnsembleConfig {
  std::size_t paths = 100;
  std::uint64_t master_seed = 1;
  StepScheme scheme;
  double horizon = 1.0;
  std::size_t record_stride = 1;
  double threshold = 1e8;
  unsigned threads = 1;
  /// Paths simulated between two ordered reductions.
  std::size_t chunk = 256;
  /// When set, every path draws its Brownian motion on this fine grid first,
  /// so ensembles at different dyadic dt share the same noise realizations.
  std::optional<double> shared_brownian_dt;
};

/// Per-path extra observables: one series per channel, one value per regular
/// (grid) sample of the path. Shorter series mean the path was censored.
struct PathObserver {
  std::vector<std::string> channels;
  bool needs_fields = false;
  std::function<std::vector<std::vector<double>>(const TrajectoryRecord&)> evaluate;
};

/// Mean and standard error per record time over the paths alive at that time.
struct SeriesStat {
  std::vector<double> mean;
  std::vector<double> se;
  std::vector<std::size_t> count;
};

struct PathOutcome {
  std::size_t path;
  bool blowup = false;
  double tau = 0.0;
  std::string trigger;
  std::string error;  // nonempty when the path failed
  std::size_t halvings = 0;
};

struct EnsembleEstimate {
  std::vector<double> times;
  SeriesStat v;  // ‖u‖²
  SeriesStat g;  // ‖∇u‖²
  SeriesStat p;  // ‖u‖^{m+1}_{m+1}
  std::vector<double> blowup_fraction;
  std::vector<PathOutcome> outcomes;  // in path order
  std::vector<std::string> channel_names;
  std::vector<SeriesStat> channels;
  std::size_t paths = 0;
  std::size_t failed_paths = 0;

  /// Blow-up times of the paths that blew up, ascending.
  std::vector<double> tau_samples() const;
  std::size_t censored_count() const;
};

/// Record times shared by every path of an ensemble.
std::vector<double> record_times(double horizon, double dt, std::size_t stride);

/// Runs config.paths independent paths (streams derived from (seed, index)),
/// optionally across threads, and reduces them in path-index order, so the
/// estimate is bitwise independent of the thread count. Paths that blow up
/// contribute only before their blow-up time.
EnsembleEstimate run_ensemble(const EnsembleConfig& config, const SpdeProblem& problem, const Field& u0,
                              const PathObserver* observer = nullptr);

struct MeanSquareBlowup {
  std::optional<double> tau_ms;
  std::string trigger;  // "ci_threshold", "blowup_fraction" or "" when none fired
  std::optional<double> ci_time;
  std::optional<double> fraction_time;
};

/// Earliest of: first record time where v̂ - z·SE exceeds `ms_threshold`,
/// and the time at which the blow-up fraction reaches one half.
MeanSquareBlowup detect_mean_square_blowup(const EnsembleEstimate& estimate, double ms_threshold, double z = 1.96);

struct Refinement {
  double dt;
  std::size_t nodes;
  std::size_t paths;
};

struct ConvergenceRow {
  Refinement refinement;
  double h = 0.0;
  double v_hat = 0.0;
  double v_se = 0.0;
  double error = 0.0;     // v̂ - reference
  double error_se = 0.0;  // SE of the paired difference when the reference is the last row
  std::optional<double> tau_ms;
};

struct ConvergenceTable {
  double t_check = 0.0;
  std::vector<ConvergenceRow> rows;
  std::vector<std::string> order_kind;  // "dt", "h" or "M" per consecutive pair
  std::vector<double> observed_order;
};

/// Runs one ensemble per refinement and reports v̂(t_check), errors against
/// `reference` (or against the last row, with shared noise) and the observed
/// orders between consecutive rows. The initial field is resampled on each grid.
ConvergenceTable convergence_study(const EnsembleConfig& base, const SpdeProblem& problem,
                                   const std::function<double(double)>& initial,
                                   std::span<const Refinement> refinements, double t_check,
                                   std::optional<double> reference, double ms_threshold = 1e12);

}  // namespace stochblow
