#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "stochblow/rng.hpp"

namespace stochblow {

struct LevyAtom {
  double mark;
  double rate;
};

/// λ = Σ r_k δ_{z_k}.
struct FiniteAtoms {
  std::vector<LevyAtom> atoms;
};

/// Symmetric density c / |z|^{1+alpha} restricted to r_min ≤ |z| ≤ r_max.
struct TruncatedStable {
  double c;
  double alpha;
  double r_min;
  double r_max;
};

struct JumpEvent {
  double time;
  double mark;
};

/// Weighted mark nodes {(z_q, w_q)} with Σ w_q g(z_q) ≈ ∫ g dλ.
using LevyRule = std::vector<std::pair<double, double>>;

/// Finite-activity Lévy measure on the real mark space. Immutable.
class LevyMeasure {
 public:
  using Variant = std::variant<FiniteAtoms, TruncatedStable>;

  /// The zero measure (no jumps).
  LevyMeasure();
  explicit LevyMeasure(FiniteAtoms atoms);
  explicit LevyMeasure(TruncatedStable density);

  const Variant& spec() const { return spec_; }
  bool is_zero() const;
  std::string describe() const;

  /// λ(Z).
  double total_rate() const;

  /// ∫ g(z) λ(dz); adaptive quadrature (rel. tol 1e-10) for the density variant.
  /// Throws std::domain_error when g is not finite on the support.
  double integrate(const std::function<double(double)>& g) const;

  /// ∫ (|z|² ∧ 1) λ(dz); finite for every valid measure.
  double levy_moment() const;

  /// Homogeneous Poisson jump times with rate λ(Z) on (0, horizon], marks
  /// i.i.d. from λ / λ(Z), sorted by time.
  std::vector<JumpEvent> sample_jumps(double horizon, RngStream& rng) const;

  /// One mark drawn from the normalized measure.
  double sample_mark(RngStream& rng) const;

  /// Fixed discrete rule used inside the time stepper.
  const LevyRule& rule() const { return rule_; }

  /// Representative support points, used for sign checks on η profiles.
  std::vector<double> support_points(std::size_t per_side = 201) const;

 private:
  void build_rule();

  Variant spec_;
  LevyRule rule_;
  std::vector<double> cumulative_;  // atoms: cumulative rate for categorical draws
};

double total_rate(const LevyMeasure& levy);
double integral_against_levy(const LevyMeasure& levy, const std::function<double(double)>& g);
std::vector<JumpEvent> sample_jumps(const LevyMeasure& levy, double horizon, RngStream& rng);

}  // namespace stochblow
