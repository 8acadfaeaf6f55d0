#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stochblow/grid.hpp"
#include "stochblow/levy.hpp"
#include "stochblow/noise.hpp"
#include "stochblow/rng.hpp"

namespace stochblow {

/// du = [αΔu + β|u|^{m-1}u] dt + noise.
struct ModelParams {
  double alpha;
  double beta;
  double m;
};

/// Integrator-level check: α, β ≥ 0 and m ≥ 1. With `theorem_hypotheses`
/// the blow-up theorems' α, β > 0 and m > 1 are required instead.
void validate_model(const ModelParams& params, bool theorem_hypotheses);

enum class JumpMode { fixed_grid, jump_adapted };

const char* to_string(JumpMode mode);

struct StepScheme {
  double dt = 1e-4;
  JumpMode jump_mode = JumpMode::jump_adapted;
  /// Bound on dt·β·‖u‖∞^{m-1}; a step above it is halved.
  double guard = 0.5;
  int max_halvings = 60;
};

/// Everything that defines the equation being integrated.
struct SpdeProblem {
  IntervalGrid grid;
  ModelParams params;
  NoiseModel noise;
  LevyMeasure levy;
};

/// |u|^{m-1} u with fast paths for small integer m.
double signed_power(double u, double m);

/// Semi-implicit Euler-Maruyama stepper: Laplacian implicit, nonlinearity and
/// noise explicit. Owns workspaces; one instance per path.
class SemiImplicitStepper {
 public:
  explicit SemiImplicitStepper(const SpdeProblem& problem);

  /// Solves (I - dt α Lap) out = u + dt β|u|^{m-1}u + G ΔW + Σ H(z_j) - dt·C,
  /// with G, H, C the diffusion, jump and compensator terms of the noise model
  /// evaluated at (u, t).
  void step(std::span<const double> u, double t, double dt, double dW, std::span<const JumpEvent> jumps,
            std::span<double> out);

  /// Jump amplitude H(z) at the pre-jump state u(t-).
  void jump_increment(std::span<const double> u_minus, double t, double z, std::span<double> out) const;

  /// dt β ‖u‖∞^{m-1}.
  double guard_value(std::span<const double> u, double dt) const;

  const SpdeProblem& problem() const { return problem_; }

 private:
  const ImplicitHeatSolver& solver_for(double dt);

  const SpdeProblem& problem_;
  std::vector<ImplicitHeatSolver> solvers_;
  std::vector<double> rhs_;
  std::vector<double> jump_work_;
  double eta_mean_ = 0.0;  // multiplicative: ∫ η dλ
};

/// One step of the scheme; convenience wrapper over SemiImplicitStepper.
Field step(const SpdeProblem& problem, std::span<const double> u, double t, double dt, double dW,
           std::span<const JumpEvent> jumps = {});

/// Brownian path pre-sampled on a uniform fine grid, so runs at coarser
/// dyadic time steps can share the same noise realization.
class BrownianPath {
 public:
  BrownianPath(double fine_dt, std::size_t steps, RngStream& rng);

  double fine_dt() const { return fine_dt_; }
  /// W(t1) - W(t0); both times must lie on the fine grid.
  double increment(double t0, double t1) const;
  bool aligned(double t) const;

 private:
  std::size_t index(double t) const;

  double fine_dt_;
  std::vector<double> w_;
};

struct NormSample {
  double time;
  double l2sq;  // ‖u‖²
  double h1sq;  // ‖∇u‖²
  double lmp1;  // ‖u‖^{m+1}_{m+1}
  double w;     // W(time)
  bool jump;    // pre- or post-jump entry (jump_adapted)
};

struct JumpRecord {
  double time;
  double mark;
  double pre_l2sq;   // NaN in fixed_grid mode
  double post_l2sq;  // NaN in fixed_grid mode
  std::size_t pre_sample;   // index of the pre-jump sample (jump_adapted)
  std::size_t grid_step;    // index of the time step that consumed the jump
};

struct BlowupInfo {
  bool detected = false;
  double tau = std::numeric_limits<double>::infinity();
  std::string trigger;  // "threshold", "non_finite" or "step_guard"
};

struct TrajectoryRecord {
  std::vector<NormSample> samples;
  std::vector<Field> snapshots;            // parallel to samples when fields were stored
  std::vector<std::size_t> grid_samples;   // indices of the regular (non-jump) samples
  std::vector<JumpRecord> jumps;
  BlowupInfo blowup;
  double dt = 0.0;
  std::size_t record_stride = 1;
  std::size_t halvings = 0;  // total guard halvings performed
};

struct PathOptions {
  double horizon = 1.0;
  double threshold = 1e8;  // Θ on ‖u‖_{L²}
  std::size_t record_stride = 1;
  bool store_fields = false;
  /// Shared Brownian path (fixed_grid mode or jump-free problems only).
  const BrownianPath* brownian = nullptr;
  /// Preset jump events replacing the sampled ones.
  const std::vector<JumpEvent>* jumps = nullptr;
};

/// Integrates one path over [0, horizon] or until blow-up detection. The
/// path's random numbers come from streams (seed, path_index, 0..2): Brownian
/// increments, jump events and Brownian-bridge refinements respectively.
TrajectoryRecord simulate_path(const SpdeProblem& problem, const Field& u0, const StepScheme& scheme,
                               const PathOptions& options, std::uint64_t seed, std::uint64_t path_index);

}  // namespace stochblow
