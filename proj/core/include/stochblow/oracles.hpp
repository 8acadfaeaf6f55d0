#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stochblow/ensemble.hpp"
#include "stochblow/integrator.hpp"

namespace stochblow {

/// Order constant C in the balance tolerance 3·SE + C·dt·S, where S is the
/// largest mean of the balanced functional inside the checked window.
/// Calibrated on the decaying-sine heat preset and kept fixed.
inline constexpr double kBalanceOrderConstant = 8.0;

struct BalanceReport {
  std::string identity;
  std::vector<double> times;        // checked window (pre-blow-up)
  std::vector<double> lhs;          // mean of Φ(u_t) - Φ(u_0)
  std::vector<double> rhs;          // mean of the time-integrated Itô rate
  std::vector<double> gap;          // mean of lhs - rhs per path
  std::vector<double> gap_se;
  std::vector<double> statistical;  // mean of the reconstructed martingale part
  std::vector<double> discretization;  // gap - statistical
  double max_abs_gap = 0.0;
  double max_abs_discretization = 0.0;
  double tolerance = 0.0;
  double scale = 0.0;               // S
  bool inequality = false;          // only lhs - rhs >= -tolerance is asserted
  bool pass = false;
  std::string note;

  // Remainder bookkeeping for the L^{m+1} balance: θ-form vs direct difference per jump.
  std::size_t theta_checks = 0;
  double theta_max_residual = 0.0;
  bool remainder_nonnegative = true;
};

enum class BalanceKind { l2, grad, lmp1, multiplicative };

const char* to_string(BalanceKind kind);

/// Runs an ensemble with field snapshots and checks the expected energy
/// balance of `kind` on the record times before any path comes within a
/// factor 100 of the blow-up threshold. The ensemble must record every step
/// (record_stride 1).
BalanceReport ito_balance(BalanceKind kind, const SpdeProblem& problem, const Field& u0,
                          const EnsembleConfig& config, double order_constant = kBalanceOrderConstant);

BalanceReport ito_balance_l2(const SpdeProblem& problem, const Field& u0, const EnsembleConfig& config,
                             double order_constant = kBalanceOrderConstant);
BalanceReport ito_balance_grad(const SpdeProblem& problem, const Field& u0, const EnsembleConfig& config,
                               double order_constant = kBalanceOrderConstant);
/// Additive noise: equality. Multiplicative noise: the jump remainder is
/// dropped and only the one-sided inequality is checked.
BalanceReport ito_balance_lmp1(const SpdeProblem& problem, const Field& u0, const EnsembleConfig& config,
                               double order_constant = kBalanceOrderConstant);
BalanceReport ito_balance_multiplicative(const SpdeProblem& problem, const Field& u0, const EnsembleConfig& config,
                                         double order_constant = kBalanceOrderConstant);

struct ThetaResult {
  bool found = false;
  double theta = 0.0;
  double lhs = 0.0;       // ‖u+η‖^{m+1} - ‖u‖^{m+1} - (m+1)(|u|^{m-1}u, η)
  double residual = 0.0;  // |g(θ)|
};

/// Smallest θ in [0, 1] with (m(m+1)/2)(|u+θη|^{m-1}, η²) equal to the
/// Taylor remainder, by a 1000-point scan followed by bisection. Sums carry
/// the uniform weight `weight`. η ≡ 0 returns θ = 0.
ThetaResult taylor_remainder_theta(std::span<const double> u, std::span<const double> eta, double m,
                                   double weight = 1.0);
ThetaResult taylor_remainder_theta(const IntervalGrid& grid, std::span<const double> u,
                                   std::span<const double> eta, double m);

struct ThetaSweepReport {
  std::size_t triples = 0;
  std::size_t failures = 0;           // no root, or residual above 1e-10·max(1, |lhs|)
  double max_relative_residual = 0.0;
  bool pass = false;
};

/// Randomized (u, η, m) triples with m in (1, 6] and sizes up to 32 nodes.
ThetaSweepReport taylor_theta_property(std::size_t triples, std::uint64_t seed);

struct MomentLawCheck {
  double time = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double expected = 0.0;
  bool pass = false;
};

struct MomentLawReport {
  std::string name;
  double rate = 0.0;  // σ² + ∫ η² dλ
  std::vector<MomentLawCheck> checks;
  bool pass = false;
};

/// Scalar reduction of the linear multiplicative equation (α = β = 0, spatially
/// constant data): E[u(t)²] = u0² exp((σ² + ∫η²dλ) t), checked within `z` SE.
/// `times` must lie on the dt grid.
MomentLawReport scalar_second_moment_law(const MultiplicativeNoise& noise, const LevyMeasure& levy, double u0,
                                         std::span<const double> times, std::size_t paths, std::uint64_t seed,
                                         double dt, unsigned threads = 1, double z = 3.0);

struct MartingaleCheck {
  std::string name;
  double time = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double variance = 0.0;
  double variance_expected = 0.0;
  double variance_se = 0.0;
  bool mean_pass = false;
  bool variance_pass = false;
};

struct MartingaleReport {
  std::vector<MartingaleCheck> checks;
  bool pass = false;
};

/// Empirical mean-zero and isometry checks at `times` over `streams`
/// independent streams:
///   N(t) - t λ(Z),
///   Σ_{jumps ≤ t} (u, η(s, z)) - ∫₀ᵗ∫ (u, η) dλ ds  (g(z) = z when η is absent),
///   ∫₀ᵗ (σ(s), u) dW(s)  (left-point sums with step dt),
/// for the frozen field u. Variances are compared with their closed forms.
MartingaleReport martingale_checks(const LevyMeasure& levy, const AdditiveNoise& noise, const IntervalGrid& grid,
                                   const Field& frozen, std::span<const double> times, std::size_t streams,
                                   std::uint64_t seed, double dt, double z = 4.0);

/// Grid with four times finer spacing on the same interval: 4(n+1) - 1 nodes.
IntervalGrid refine_grid(const IntervalGrid& grid, std::size_t factor = 4);

/// Zero-noise run of the same scheme on `fine_grid` with step `dt_fine`.
TrajectoryRecord reference_solve(const ModelParams& params, const std::function<double(double)>& u0,
                                 const IntervalGrid& fine_grid, double dt_fine, double horizon,
                                 double threshold = 1e8, std::size_t record_stride = 1);

/// Jump-log consistency of a jump-adapted path: every JumpRecord's pre/post
/// norms equal the recorded samples bit for bit. Returns the number of jumps checked.
std::optional<std::size_t> check_jump_log(const TrajectoryRecord& record);

}  // namespace stochblow
