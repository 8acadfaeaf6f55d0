#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "stochblow/grid.hpp"
#include "stochblow/levy.hpp"

namespace stochblow {

/// State-independent forcing: σ(x, t) dW + ∫ η(x, t, z) π̃(dt, dz).
/// Both coefficients are taken to vanish for t > decay_horizon.
struct AdditiveNoise {
  std::function<double(double x, double t)> sigma;          // empty: σ ≡ 0
  std::function<double(double x, double t, double z)> eta;  // empty: η ≡ 0
  double decay_horizon = 0.0;
  std::string label = "none";

  double sigma_at(double x, double t) const {
    return (sigma && t <= decay_horizon) ? sigma(x, t) : 0.0;
  }
  double eta_at(double x, double t, double z) const {
    return (eta && t <= decay_horizon) ? eta(x, t, z) : 0.0;
  }
  bool has_sigma() const { return static_cast<bool>(sigma); }
  bool has_eta() const { return static_cast<bool>(eta); }

  Field sigma_field(const IntervalGrid& grid, double t) const;
  Field eta_field(const IntervalGrid& grid, double t, double z) const;

  static AdditiveNoise none();
  /// σ = a_σ e^{-rt} sin(kπx/L), η = a_η z e^{-rt} sin(kπx/L).
  static AdditiveNoise decaying_sine(double sigma_amplitude, double eta_amplitude, double decay_rate,
                                     int mode, double length, double decay_horizon);
};

/// Linear multiplicative forcing: σ u dW + ∫ η(z) u(t-) π̃(dt, dz), with η ≥ 0.
class MultiplicativeNoise {
 public:
  /// Rejects η with η(z) < 0 at any support point of `levy`.
  MultiplicativeNoise(double sigma, std::function<double(double z)> eta, const LevyMeasure& levy,
                      std::string label = "multiplicative");

  double sigma() const { return sigma_; }
  double eta(double z) const { return eta_ ? eta_(z) : 0.0; }
  const std::string& label() const { return label_; }

 private:
  double sigma_;
  std::function<double(double)> eta_;
  std::string label_;
};

using NoiseModel = std::variant<AdditiveNoise, MultiplicativeNoise>;

inline bool is_additive(const NoiseModel& noise) { return std::holds_alternative<AdditiveNoise>(noise); }

/// ∫₀^{T∞} ‖∇σ(t)‖² + ∫ ‖∇η(t, z)‖² λ(dz) dt by adaptive Gauss-Kronrod in
/// time (rel. tol 1e-10). Empty when the quadrature does not settle.
std::optional<double> noise_grad_energy(const AdditiveNoise& noise, const IntervalGrid& grid,
                                        const LevyMeasure& levy);

/// ‖σ(t)‖² + ∫ ‖η(t, z)‖² λ(dz), the noise term of the L² energy rate.
double noise_flat_rate(const AdditiveNoise& noise, const IntervalGrid& grid, const LevyMeasure& levy,
                       double t);

/// ∫₀^t noise_flat_rate ds (same time quadrature).
std::optional<double> noise_flat_energy(const AdditiveNoise& noise, const IntervalGrid& grid,
                                        const LevyMeasure& levy, double t);

/// ‖∇σ(t)‖² + ∫ ‖∇η(t, z)‖² λ(dz).
double noise_grad_rate(const AdditiveNoise& noise, const IntervalGrid& grid, const LevyMeasure& levy,
                       double t);

/// κ = ½(σ² + ∫ η² dλ).
double kappa(const MultiplicativeNoise& noise, const LevyMeasure& levy);

struct KappaWindow {
  bool ok;
  double margin;  // αλ₁ - κ
};

/// 0 ≤ κ ≤ αλ₁.
KappaWindow check_kappa_window(double kappa, double alpha, double lambda1);

/// Copy of `noise` with σ and η scaled by s.
NoiseModel scale_noise(const NoiseModel& noise, double s, const LevyMeasure& levy);

std::string noise_label(const NoiseModel& noise);

}  // namespace stochblow
