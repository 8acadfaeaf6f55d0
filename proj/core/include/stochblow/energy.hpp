#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stochblow/grid.hpp"
#include "stochblow/integrator.hpp"
#include "stochblow/levy.hpp"
#include "stochblow/noise.hpp"

namespace stochblow {

/// Concavity-method constants: ε = (m-1)/4, δ = (m-1)/(2(m+3)).
struct ConcavityParams {
  double epsilon;
  double delta;
  double gap;  // 2(m+1) - 4(1+ε)(1+δ), equal to (m-1)/2
};

/// Throws for m < 1; m = 1 gives the degenerate ε = δ = gap = 0.
ConcavityParams concavity_constants(double m);

enum class CriterionMode { additive, multiplicative };
enum class Verdict { blowup_predicted, not_predicted, not_evaluable };

const char* to_string(CriterionMode mode);
const char* to_string(Verdict verdict);

struct CriterionComponent {
  std::string name;
  double value;
};

struct CriterionReport {
  CriterionMode mode = CriterionMode::additive;
  std::vector<CriterionComponent> components;
  double lhs = 0.0;
  Verdict verdict = Verdict::not_evaluable;
  std::string note;

  // Multiplicative only.
  std::optional<bool> kappa_window_ok;
  double kappa = 0.0;
  double kappa_margin = 0.0;
  double lambda1 = 0.0;

  // Concavity constants and the derived blow-up-time bound.
  double epsilon = 0.0;
  double delta = 0.0;
  double v0 = 0.0;             // ‖u₀‖²
  double j0 = 0.0;             // J(0) or J̃(0)
  double grad_energy = 0.0;    // additive: ∫₀^∞ ‖∇σ‖² + ∫‖∇η‖² dλ
  double flat_energy = 0.0;    // additive: S∞ = ∫₀^∞ ‖σ‖² + ∫‖η‖² dλ
  std::optional<double> k_min;
  std::optional<double> k_used;
  std::optional<double> tstar_bound;

  double component(const std::string& name) const;
};

struct CriterionOptions {
  EigenvalueFlavor eigenvalue = EigenvalueFlavor::continuum;
  std::optional<double> k_override;
};

/// -(α/2)‖∇u₀‖² + (β/(m+1))‖u₀‖^{m+1}_{m+1} - (α/2)∫₀^∞ (‖∇σ‖² + ∫‖∇η‖² dλ) ds > 0.
CriterionReport criterion_additive(const Field& u0, const ModelParams& params, const AdditiveNoise& noise,
                                   const IntervalGrid& grid, const LevyMeasure& levy,
                                   const CriterionOptions& options = {});

/// -(α/2)‖∇u₀‖² + (β/(m+1))‖u₀‖^{m+1} + (κ/(m+1))‖u₀‖² > 0 together with 0 ≤ κ ≤ αλ₁.
CriterionReport criterion_multiplicative(const Field& u0, const ModelParams& params,
                                         const MultiplicativeNoise& noise, const IntervalGrid& grid,
                                         const LevyMeasure& levy, const CriterionOptions& options = {});

/// Dispatches on the noise family.
CriterionReport evaluate_criterion(const Field& u0, const SpdeProblem& problem, const CriterionOptions& options = {});

/// Smallest K making the constant terms of the concavity inequality nonnegative:
///   additive:       (1+1/ε)(1+δ)(v0 + S∞)² / (2(m+1)·(J0 - (α/2)·G))
///   multiplicative: (1+1/ε)(1+δ) v0² / (2(m+1)·J̃0)
/// `positive_part` is J0 - (α/2)G or J̃0. Empty when it is not positive.
std::optional<double> minimal_K(CriterionMode mode, double positive_part, double v0, double flat_energy_limit,
                                double m);

/// K / (δ v0); infinity when v0 = 0.
double tstar_bound(double K, double v0, double delta);

struct DiagnosticsInput {
  std::vector<double> times;
  std::vector<double> v;     // estimates of E‖u(t)‖²
  std::vector<double> v_se;  // standard errors (may be empty: treated as 0)
  std::vector<double> g;     // E‖∇u‖², optional
  std::vector<double> p;     // E‖u‖^{m+1}, optional
  std::vector<double> noise_rate;  // additive ‖σ‖² + ∫‖η‖²dλ per time, optional
  std::optional<double> kappa;     // multiplicative
};

struct DiagnosticsSeries {
  std::vector<double> times;
  std::vector<double> v;
  std::vector<double> I;
  std::vector<double> I_prime;
  std::vector<double> I_second;          // central differences of v
  std::vector<double> h_formula;         // from g, p and the noise terms when available
  std::vector<double> J;                 // J or J̃ when g, p available
  std::vector<double> ratio;             // I' / I^{1+δ}
  std::vector<double> concavity;         // I'' I - (1+δ) I'²
  std::optional<std::size_t> first_ratio_violation;
  double delta = 0.0;
  double K = 0.0;
};

/// Concavity diagnostics from an ensemble mean-square series on a uniform
/// time grid. A ratio decrease counts as a violation when it exceeds
/// rel_tol plus three relative standard errors of v.
DiagnosticsSeries diagnostics_from_ensemble(const DiagnosticsInput& input, const ModelParams& params, double K,
                                            double rel_tol = 1e-6);

}  // namespace stochblow
