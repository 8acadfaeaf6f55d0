#include "stochblow/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stochblow/quadrature.hpp"

namespace stochblow {

Field AdditiveNoise::sigma_field(const IntervalGrid& grid, double t) const {
  return grid.sample([&](double x) { return sigma_at(x, t); });
}

Field AdditiveNoise::eta_field(const IntervalGrid& grid, double t, double z) const {
  return grid.sample([&](double x) { return eta_at(x, t, z); });
}

AdditiveNoise AdditiveNoise::none() { return AdditiveNoise{}; }

AdditiveNoise AdditiveNoise::decaying_sine(double sigma_amplitude, double eta_amplitude, double decay_rate,
                                           int mode, double length, double decay_horizon) {
  if (!(decay_horizon > 0.0)) throw std::invalid_argument("decay_horizon must be positive");
  if (mode < 1) throw std::invalid_argument("sine mode must be >= 1");
  const double k = mode * std::numbers::pi / length;
  AdditiveNoise noise;
  noise.decay_horizon = decay_horizon;
  noise.label = "decaying_sine";
  if (sigma_amplitude != 0.0)
    noise.sigma = [=](double x, double t) { return sigma_amplitude * std::exp(-decay_rate * t) * std::sin(k * x); };
  if (eta_amplitude != 0.0)
    noise.eta = [=](double x, double t, double z) {
      return eta_amplitude * z * std::exp(-decay_rate * t) * std::sin(k * x);
    };
  return noise;
}

MultiplicativeNoise::MultiplicativeNoise(double sigma, std::function<double(double)> eta, const LevyMeasure& levy,
                                         std::string label)
    : sigma_(sigma), eta_(std::move(eta)), label_(std::move(label)) {
  if (!std::isfinite(sigma)) throw std::invalid_argument("multiplicative sigma must be finite");
  if (!eta_) return;
  for (double z : levy.support_points()) {
    const double v = eta_(z);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("multiplicative eta must satisfy eta(z) >= 0 on the support of the Levy measure; eta(" +
                                  std::to_string(z) + ") = " + std::to_string(v));
  }
}

namespace {

// Adaptive Gauss-Kronrod in time; empty when the estimate does not settle.
std::optional<double> time_integral(const std::function<double(double)>& f, double T) {
  if (T <= 0.0) return 0.0;
  const auto r = integrate_adaptive(f, 0.0, T, 1e-10, 1e-14);
  if (!r.converged || !std::isfinite(r.value)) return std::nullopt;
  return r.value;
}

}  // namespace

double noise_flat_rate(const AdditiveNoise& noise, const IntervalGrid& grid, const LevyMeasure& levy, double t) {
  double rate = 0.0;
  if (noise.has_sigma()) rate += norm_l2_sq(grid, noise.sigma_field(grid, t));
  if (noise.has_eta() && !levy.is_zero() && t <= noise.decay_horizon)
    rate += levy.integrate([&](double z) { return norm_l2_sq(grid, noise.eta_field(grid, t, z)); });
  return rate;
}

double noise_grad_rate(const AdditiveNoise& noise, const IntervalGrid& grid, const LevyMeasure& levy, double t) {
  double rate = 0.0;
  if (noise.has_sigma()) rate += seminorm_h1_sq(grid, noise.sigma_field(grid, t));
  if (noise.has_eta() && !levy.is_zero() && t <= noise.decay_horizon)
    rate += levy.integrate([&](double z) { return seminorm_h1_sq(grid, noise.eta_field(grid, t, z)); });
  return rate;
}

std::optional<double> noise_grad_energy(const AdditiveNoise& noise, const IntervalGrid& grid,
                                        const LevyMeasure& levy) {
  if (!noise.has_sigma() && (!noise.has_eta() || levy.is_zero())) return 0.0;
  return time_integral([&](double t) { return noise_grad_rate(noise, grid, levy, t); }, noise.decay_horizon);
}

std::optional<double> noise_flat_energy(const AdditiveNoise& noise, const IntervalGrid& grid,
                                        const LevyMeasure& levy, double t) {
  if (!noise.has_sigma() && (!noise.has_eta() || levy.is_zero())) return 0.0;
  const double upper = std::min(t, noise.decay_horizon);
  return time_integral([&](double s) { return noise_flat_rate(noise, grid, levy, s); }, upper);
}

double kappa(const MultiplicativeNoise& noise, const LevyMeasure& levy) {
  const double jump = levy.is_zero() ? 0.0 : levy.integrate([&](double z) {
    const double e = noise.eta(z);
    return e * e;
  });
  return 0.5 * (noise.sigma() * noise.sigma() + jump);
}

KappaWindow check_kappa_window(double kappa_value, double alpha, double lambda1) {
  const double margin = alpha * lambda1 - kappa_value;
  return {kappa_value >= 0.0 && margin >= 0.0, margin};
}

NoiseModel scale_noise(const NoiseModel& noise, double s, const LevyMeasure& levy) {
  if (const auto* add = std::get_if<AdditiveNoise>(&noise)) {
    AdditiveNoise out = *add;
    if (add->sigma) out.sigma = [f = add->sigma, s](double x, double t) { return s * f(x, t); };
    if (add->eta) out.eta = [f = add->eta, s](double x, double t, double z) { return s * f(x, t, z); };
    return out;
  }
  const auto& mul = std::get<MultiplicativeNoise>(noise);
  return MultiplicativeNoise(s * mul.sigma(), [mul, s](double z) { return s * mul.eta(z); }, levy, mul.label());
}

std::string noise_label(const NoiseModel& noise) {
  if (const auto* add = std::get_if<AdditiveNoise>(&noise)) return "additive:" + add->label;
  return "multiplicative:" + std::get<MultiplicativeNoise>(noise).label();
}

}  // namespace stochblow
