#include "stochblow/energy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stochblow {

ConcavityParams concavity_constants(double m) {
  if (!(m >= 1.0) || !std::isfinite(m)) throw std::invalid_argument("concavity constants need m >= 1");
  const double eps = (m - 1.0) / 4.0;
  const double delta = (m - 1.0) / (2.0 * (m + 3.0));
  const double gap = 2.0 * (m + 1.0) - 4.0 * (1.0 + eps) * (1.0 + delta);
  if (std::abs(gap - 0.5 * (m - 1.0)) > 1e-12 * std::max(1.0, m))
    throw std::logic_error("concavity gap identity violated");
  return {eps, delta, gap};
}

const char* to_string(CriterionMode mode) {
  return mode == CriterionMode::additive ? "additive" : "multiplicative";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::blowup_predicted:
      return "blowup_predicted";
    case Verdict::not_predicted:
      return "not_predicted";
    case Verdict::not_evaluable:
      return "not_evaluable";
  }
  return "unknown";
}

double CriterionReport::component(const std::string& name) const {
  for (const auto& c : components)
    if (c.name == name) return c.value;
  throw std::out_of_range("no criterion component named " + name);
}

std::optional<double> minimal_K(CriterionMode mode, double positive_part, double v0, double flat_energy_limit,
                                double m) {
  if (!(positive_part > 0.0)) return std::nullopt;
  const auto c = concavity_constants(m);
  if (c.epsilon == 0.0) return std::nullopt;
  const double base = mode == CriterionMode::additive ? v0 + flat_energy_limit : v0;
  return (1.0 + 1.0 / c.epsilon) * (1.0 + c.delta) * base * base / (2.0 * (m + 1.0) * positive_part);
}

double tstar_bound(double K, double v0, double delta) {
  if (v0 == 0.0 || delta == 0.0) return std::numeric_limits<double>::infinity();
  return K / (delta * v0);
}

namespace {

void finish_concavity(CriterionReport& r, double positive_part, const ModelParams& params,
                      const CriterionOptions& options) {
  const auto c = concavity_constants(params.m);
  r.epsilon = c.epsilon;
  r.delta = c.delta;
  if (r.verdict != Verdict::blowup_predicted) return;
  r.k_min = minimal_K(r.mode, positive_part, r.v0, r.flat_energy, params.m);
  r.k_used = options.k_override ? options.k_override : r.k_min;
  if (r.k_used) r.tstar_bound = tstar_bound(*r.k_used, r.v0, r.delta);
}

}  // namespace

CriterionReport criterion_additive(const Field& u0, const ModelParams& params, const AdditiveNoise& noise,
                                   const IntervalGrid& grid, const LevyMeasure& levy,
                                   const CriterionOptions& options) {
  validate_model(params, true);
  CriterionReport r;
  r.mode = CriterionMode::additive;
  const double grad = -0.5 * params.alpha * seminorm_h1_sq(grid, u0);
  const double nonlinear = params.beta / (params.m + 1.0) * norm_lp_pow(grid, u0, params.m + 1.0);
  r.v0 = norm_l2_sq(grid, u0);
  r.j0 = grad + nonlinear;

  const auto energy = noise_grad_energy(noise, grid, levy);
  const auto flat = noise_flat_energy(noise, grid, levy, noise.decay_horizon);
  if (!energy || !flat) {
    r.components = {{"gradient", grad}, {"nonlinear", nonlinear}};
    r.lhs = std::numeric_limits<double>::quiet_NaN();
    r.verdict = Verdict::not_evaluable;
    r.note = "noise energy quadrature did not converge";
    finish_concavity(r, 0.0, params, options);
    return r;
  }
  r.grad_energy = *energy;
  r.flat_energy = *flat;
  const double noise_term = -0.5 * params.alpha * r.grad_energy;
  r.components = {{"gradient", grad}, {"nonlinear", nonlinear}, {"noise", noise_term}};
  r.lhs = grad + nonlinear + noise_term;
  r.verdict = r.lhs > 0.0 ? Verdict::blowup_predicted : Verdict::not_predicted;
  finish_concavity(r, r.lhs, params, options);
  return r;
}

CriterionReport criterion_multiplicative(const Field& u0, const ModelParams& params,
                                         const MultiplicativeNoise& noise, const IntervalGrid& grid,
                                         const LevyMeasure& levy, const CriterionOptions& options) {
  validate_model(params, true);
  CriterionReport r;
  r.mode = CriterionMode::multiplicative;
  r.kappa = kappa(noise, levy);
  r.lambda1 = first_eigenvalue(grid, options.eigenvalue);
  const auto window = check_kappa_window(r.kappa, params.alpha, r.lambda1);
  r.kappa_window_ok = window.ok;
  r.kappa_margin = window.margin;

  const double grad = -0.5 * params.alpha * seminorm_h1_sq(grid, u0);
  const double nonlinear = params.beta / (params.m + 1.0) * norm_lp_pow(grid, u0, params.m + 1.0);
  r.v0 = norm_l2_sq(grid, u0);
  const double kappa_term = r.kappa / (params.m + 1.0) * r.v0;
  r.components = {{"gradient", grad}, {"nonlinear", nonlinear}, {"kappa", kappa_term}};
  r.lhs = grad + nonlinear + kappa_term;
  r.j0 = r.lhs;
  r.verdict = (r.lhs > 0.0 && window.ok) ? Verdict::blowup_predicted : Verdict::not_predicted;
  if (!window.ok) r.note = "kappa outside [0, alpha*lambda1]";
  finish_concavity(r, r.lhs, params, options);
  return r;
}

CriterionReport evaluate_criterion(const Field& u0, const SpdeProblem& problem, const CriterionOptions& options) {
  if (const auto* add = std::get_if<AdditiveNoise>(&problem.noise))
    return criterion_additive(u0, problem.params, *add, problem.grid, problem.levy, options);
  return criterion_multiplicative(u0, problem.params, std::get<MultiplicativeNoise>(problem.noise), problem.grid,
                                  problem.levy, options);
}

DiagnosticsSeries diagnostics_from_ensemble(const DiagnosticsInput& in, const ModelParams& params, double K,
                                            double rel_tol) {
  const std::size_t n = in.times.size();
  if (n < 3) throw std::invalid_argument("concavity diagnostics need at least 3 time points");
  if (in.v.size() != n) throw std::invalid_argument("v series does not match the time grid");
  if (!(K > 0.0)) throw std::invalid_argument("K must be positive");
  const double step = in.times[1] - in.times[0];
  for (std::size_t k = 1; k < n; ++k) {
    const double d = in.times[k] - in.times[k - 1];
    if (!(d > 0.0) || std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(in.times[k])))
      throw std::invalid_argument("concavity diagnostics need a uniform, increasing time grid");
  }

  DiagnosticsSeries out;
  out.times = in.times;
  out.v = in.v;
  out.K = K;
  out.delta = concavity_constants(params.m).delta;
  out.I.resize(n);
  out.I_prime = in.v;
  out.I_second.resize(n);
  out.ratio.resize(n);
  out.concavity.resize(n);

  out.I[0] = K;
  for (std::size_t k = 1; k < n; ++k) out.I[k] = out.I[k - 1] + 0.5 * step * (in.v[k] + in.v[k - 1]);
  out.I_second[0] = (in.v[1] - in.v[0]) / step;
  out.I_second[n - 1] = (in.v[n - 1] - in.v[n - 2]) / step;
  for (std::size_t k = 1; k + 1 < n; ++k) out.I_second[k] = (in.v[k + 1] - in.v[k - 1]) / (2.0 * step);
  for (std::size_t k = 0; k < n; ++k) {
    out.ratio[k] = in.v[k] / std::pow(out.I[k], 1.0 + out.delta);
    out.concavity[k] = out.I_second[k] * out.I[k] - (1.0 + out.delta) * in.v[k] * in.v[k];
  }

  const bool have_gp = in.g.size() == n && in.p.size() == n;
  if (have_gp) {
    out.h_formula.resize(n);
    out.J.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      double h = -2.0 * params.alpha * in.g[k] + 2.0 * params.beta * in.p[k];
      double J = -0.5 * params.alpha * in.g[k] + params.beta / (params.m + 1.0) * in.p[k];
      if (in.kappa) {
        h += 2.0 * *in.kappa * in.v[k];
        J += *in.kappa / (params.m + 1.0) * in.v[k];
      } else if (in.noise_rate.size() == n) {
        h += in.noise_rate[k];
      }
      out.h_formula[k] = h;
      out.J[k] = J;
    }
  }

  for (std::size_t k = 0; k + 1 < n; ++k) {
    double tol = rel_tol;
    if (in.v_se.size() == n && in.v[k + 1] > 0.0 && in.v[k] > 0.0) tol += 3.0 * (in.v_se[k + 1] / in.v[k + 1] + in.v_se[k] / in.v[k]);
    if (out.ratio[k + 1] < out.ratio[k] * (1.0 - tol)) {
      out.first_ratio_violation = k + 1;
      break;
    }
  }
  return out;
}

}  // namespace stochblow
