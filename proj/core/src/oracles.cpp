#include "stochblow/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "stochblow/quadrature.hpp"

namespace stochblow {

const char* to_string(BalanceKind kind) {
  switch (kind) {
    case BalanceKind::l2:
      return "ito_balance_l2";
    case BalanceKind::grad:
      return "ito_balance_grad";
    case BalanceKind::lmp1:
      return "ito_balance_lmp1";
    case BalanceKind::multiplicative:
      return "ito_balance_multiplicative";
  }
  return "unknown";
}

namespace {

using Span = std::span<const double>;

double abs_pow(double x, double p) {
  if (p == 0.0) return 1.0;
  if (p == 1.0) return std::abs(x);
  if (p == 2.0) return x * x;
  return std::pow(std::abs(x), p);
}

// |u+e|^p - |u|^p - p|u|^{p-2}u e without cancellation when |e| << |u|:
// binomial series |u|^p Σ_{k≥2} C(p,k) (e/u)^k.
double taylor_remainder(double u, double e, double p) {
  const double x = (u == 0.0) ? std::numeric_limits<double>::infinity() : e / u;
  if (std::abs(x) >= 0.05) return abs_pow(u + e, p) - abs_pow(u, p) - p * signed_power(u, p - 1.0) * e;
  double coef = p * (p - 1.0) / 2.0;
  double xk = x * x;
  double sum = 0.0;
  for (int k = 2; k < 60; ++k) {
    const double term = coef * xk;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    coef *= (p - k) / (k + 1.0);
    xk *= x;
  }
  return abs_pow(u, p) * sum;
}

/// Noise data that depends on time only, shared by all paths.
struct NoiseAt {
  Field sigma;                  // additive σ(t)
  std::vector<Field> eta;       // additive η(t, z_q) per rule node
  double flat = 0.0;            // ‖σ‖² + ∫‖η‖²dλ
  double grad = 0.0;            // ‖∇σ‖² + ∫‖∇η‖²dλ
};

class BalanceEvaluator {
 public:
  BalanceEvaluator(BalanceKind kind, const SpdeProblem& problem, std::span<const double> times)
      : kind_(kind), problem_(problem), lap_(build_laplacian(problem.grid)), rule_(problem.levy.rule()) {
    const auto& p = problem.params;
    additive_ = is_additive(problem.noise);
    if (kind == BalanceKind::multiplicative && additive_)
      throw std::invalid_argument("multiplicative balance needs multiplicative noise");
    if ((kind == BalanceKind::l2 || kind == BalanceKind::grad) && !additive_)
      throw std::invalid_argument("this balance needs additive noise");
    if (!additive_) {
      const auto& mul = std::get<MultiplicativeNoise>(problem.noise);
      sigma_ = mul.sigma();
      kappa_ = kappa(mul, problem.levy);
      for (const auto& [z, w] : rule_) eta_scalar_.push_back(mul.eta(z));
    }
    lmp1_exp_ = p.m + 1.0;
    for (double t : times) {
      times_.push_back(t);
      cache_.push_back(noise_at(t));
    }
  }

  bool inequality() const { return kind_ == BalanceKind::lmp1 && !additive_; }

  double value(Span u) const {
    const auto& g = problem_.grid;
    switch (kind_) {
      case BalanceKind::l2:
      case BalanceKind::multiplicative:
        return norm_l2_sq(g, u);
      case BalanceKind::grad:
        return seminorm_h1_sq(g, u);
      case BalanceKind::lmp1:
        return norm_lp_pow(g, u, lmp1_exp_);
    }
    return 0.0;
  }

  /// Φ'(u)[v].
  double first(Span u, Span v) const {
    const auto& g = problem_.grid;
    switch (kind_) {
      case BalanceKind::l2:
      case BalanceKind::multiplicative:
        return 2.0 * inner(g, u, v);
      case BalanceKind::grad: {
        const auto lu = lap_.apply(u);
        return -2.0 * inner(g, lu, v);
      }
      case BalanceKind::lmp1: {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += signed_power(u[i], problem_.params.m) * v[i];
        return (problem_.params.m + 1.0) * g.spacing() * s;
      }
    }
    return 0.0;
  }

  /// Φ''(u)[v, v].
  double second(Span u, Span v) const {
    const auto& g = problem_.grid;
    switch (kind_) {
      case BalanceKind::l2:
      case BalanceKind::multiplicative:
        return 2.0 * norm_l2_sq(g, v);
      case BalanceKind::grad:
        return 2.0 * seminorm_h1_sq(g, v);
      case BalanceKind::lmp1: {
        const double m = problem_.params.m;
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += abs_pow(u[i], m - 1.0) * v[i] * v[i];
        return m * (m + 1.0) * g.spacing() * s;
      }
    }
    return 0.0;
  }

  /// Expected rate of change of Φ at state u and time t (for the
  /// multiplicative L^{m+1} relation: the lower bound without the jump remainder).
  double rate(Span u, const NoiseAt& n) const {
    const auto& g = problem_.grid;
    const auto& p = problem_.params;
    switch (kind_) {
      case BalanceKind::l2:
        return -2.0 * p.alpha * seminorm_h1_sq(g, u) + 2.0 * p.beta * norm_lp_pow(g, u, lmp1_exp_) + n.flat;
      case BalanceKind::multiplicative:
        return -2.0 * p.alpha * seminorm_h1_sq(g, u) + 2.0 * p.beta * norm_lp_pow(g, u, lmp1_exp_) +
               2.0 * kappa_ * norm_l2_sq(g, u);
      case BalanceKind::grad: {
        const auto lu = lap_.apply(u);
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
          s += lu[i] * (p.alpha * lu[i] + p.beta * signed_power(u[i], p.m));
        return -2.0 * g.spacing() * s + n.grad;
      }
      case BalanceKind::lmp1: {
        const auto lu = lap_.apply(u);
        double drift = 0.0;
        double ito = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
          const double f = signed_power(u[i], p.m);
          drift += f * (p.alpha * lu[i] + p.beta * f);
          const double s = additive_ ? n.sigma[i] : sigma_ * u[i];
          ito += abs_pow(u[i], p.m - 1.0) * s * s;
        }
        double r = g.spacing() * ((p.m + 1.0) * drift + 0.5 * p.m * (p.m + 1.0) * ito);
        if (additive_) {
          const double phi = value(u);
          Field w(u.size());
          for (std::size_t q = 0; q < rule_.size(); ++q) {
            for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] + n.eta[q][i];
            r += rule_[q].second * (value(w) - phi - first(u, n.eta[q]));
          }
        }
        return r;
      }
    }
    return 0.0;
  }

  /// Martingale increment over [t, t+dt] without jumps: Brownian term,
  /// quadratic-variation fluctuation and the compensator of the jump part.
  double martingale_step(Span u, const NoiseAt& n, double dt, double dW) const {
    double inc = 0.0;
    Field gfield(u.size());
    if (additive_) {
      gfield = n.sigma;
    } else {
      for (std::size_t i = 0; i < u.size(); ++i) gfield[i] = sigma_ * u[i];
    }
    if (std::any_of(gfield.begin(), gfield.end(), [](double x) { return x != 0.0; }))
      inc += first(u, gfield) * dW + 0.5 * second(u, gfield) * (dW * dW - dt);
    if (!rule_.empty()) {
      const double phi = value(u);
      Field w(u.size());
      double comp = 0.0;
      for (std::size_t q = 0; q < rule_.size(); ++q) {
        for (std::size_t i = 0; i < u.size(); ++i)
          w[i] = u[i] + (additive_ ? n.eta[q][i] : eta_scalar_[q] * u[i]);
        comp += rule_[q].second * (value(w) - phi);
      }
      inc -= dt * comp;
    }
    return inc;
  }

  /// Jump amplitude at pre-jump state u (fixed-grid reconstruction).
  Field jump_amplitude(Span u, double t, double z) const {
    Field h(u.size());
    if (additive_) {
      const auto& add = std::get<AdditiveNoise>(problem_.noise);
      for (std::size_t i = 0; i < u.size(); ++i) h[i] = add.eta_at(problem_.grid.node(i), t, z);
    } else {
      const double e = std::get<MultiplicativeNoise>(problem_.noise).eta(z);
      for (std::size_t i = 0; i < u.size(); ++i) h[i] = e * u[i];
    }
    return h;
  }

  const NoiseAt& at(double t, NoiseAt& scratch) const {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it != times_.end() && *it == t) return cache_[static_cast<std::size_t>(it - times_.begin())];
    scratch = noise_at(t);
    return scratch;
  }

  void note_jump(Span u, Span h) {
    if (kind_ != BalanceKind::lmp1 || !additive_) return;
    const auto theta = taylor_remainder_theta(problem_.grid, u, h, problem_.params.m);
    Field w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] + h[i];
    const double direct = value(w) - value(u) - first(u, h);
    const double rel = theta.found ? theta.residual / std::max(1.0, std::abs(theta.lhs))
                                   : std::numeric_limits<double>::infinity();
    std::lock_guard lock(mutex_);
    ++theta_checks_;
    theta_max_residual_ = std::max(theta_max_residual_, rel);
    if (direct < -1e-12 * std::max(1.0, value(u))) remainder_nonnegative_ = false;
  }

  std::size_t theta_checks() const { return theta_checks_; }
  double theta_max_residual() const { return theta_max_residual_; }
  bool remainder_nonnegative() const { return remainder_nonnegative_; }

 private:
  NoiseAt noise_at(double t) const {
    NoiseAt n;
    if (!additive_) return n;
    const auto& add = std::get<AdditiveNoise>(problem_.noise);
    const auto& g = problem_.grid;
    n.sigma = add.sigma_field(g, t);
    for (const auto& [z, w] : rule_) n.eta.push_back(add.eta_field(g, t, z));
    if (kind_ == BalanceKind::l2) n.flat = noise_flat_rate(add, g, problem_.levy, t);
    if (kind_ == BalanceKind::grad) n.grad = noise_grad_rate(add, g, problem_.levy, t);
    return n;
  }

  BalanceKind kind_;
  const SpdeProblem& problem_;
  SymTridiagonal lap_;
  LevyRule rule_;
  bool additive_ = true;
  double sigma_ = 0.0;
  double kappa_ = 0.0;
  double lmp1_exp_ = 2.0;
  std::vector<double> eta_scalar_;
  std::vector<double> times_;
  std::vector<NoiseAt> cache_;

  std::mutex mutex_;
  std::size_t theta_checks_ = 0;
  double theta_max_residual_ = 0.0;
  bool remainder_nonnegative_ = true;
};

enum Channel : std::size_t { ch_lhs, ch_rhs, ch_gap, ch_stat, ch_disc, ch_near, ch_phi, ch_count };

std::vector<std::vector<double>> evaluate_path(BalanceEvaluator& ev, const TrajectoryRecord& rec,
                                               double near_level) {
  std::vector<std::vector<double>> out(ch_count);
  if (rec.snapshots.size() != rec.samples.size() || rec.samples.empty()) return out;
  const std::size_t S = rec.samples.size();
  const bool fixed = !rec.jumps.empty() && std::isnan(rec.jumps.front().pre_l2sq);

  NoiseAt scratch_a, scratch_b;
  const double phi0 = ev.value(rec.snapshots[0]);
  double integral = 0.0;
  double mart = 0.0;
  std::size_t next_grid = 0;
  std::size_t grid_step = 0;
  std::size_t next_jump = 0;
  double prev_rate = ev.rate(rec.snapshots[0], ev.at(rec.samples[0].time, scratch_a));

  auto emit = [&](std::size_t i) {
    const double phi = ev.value(rec.snapshots[i]);
    const double lhs = phi - phi0;
    out[ch_lhs].push_back(lhs);
    out[ch_rhs].push_back(integral);
    out[ch_gap].push_back(lhs - integral);
    out[ch_stat].push_back(mart);
    out[ch_disc].push_back(lhs - integral - mart);
    out[ch_near].push_back(std::sqrt(rec.samples[i].l2sq) >= near_level ? 1.0 : 0.0);
    out[ch_phi].push_back(phi);
  };

  if (next_grid < rec.grid_samples.size() && rec.grid_samples[next_grid] == 0) {
    emit(0);
    ++next_grid;
  }
  for (std::size_t i = 0; i + 1 < S; ++i) {
    const auto& a = rec.samples[i];
    const auto& b = rec.samples[i + 1];
    const auto& ua = rec.snapshots[i];
    const auto& ub = rec.snapshots[i + 1];
    if (b.time == a.time) {
      // Pre/post pair of a jump-adapted jump.
      Field h(ua.size());
      for (std::size_t k = 0; k < h.size(); ++k) h[k] = ub[k] - ua[k];
      ev.note_jump(ua, h);
      mart += ev.value(ub) - ev.value(ua);
      prev_rate = ev.rate(ub, ev.at(b.time, scratch_a));
    } else {
      const double dt = b.time - a.time;
      const NoiseAt& na = ev.at(a.time, scratch_a);
      const NoiseAt& nb = ev.at(b.time, scratch_b);
      mart += ev.martingale_step(ua, na, dt, b.w - a.w);
      if (fixed) {
        while (next_jump < rec.jumps.size() && rec.jumps[next_jump].grid_step == grid_step) {
          const auto& j = rec.jumps[next_jump++];
          const Field h = ev.jump_amplitude(ua, a.time, j.mark);
          ev.note_jump(ua, h);
          Field w(ua.size());
          for (std::size_t k = 0; k < w.size(); ++k) w[k] = ua[k] + h[k];
          mart += ev.value(w) - ev.value(ua);
        }
      }
      const double rate_b = ev.rate(ub, nb);
      integral += 0.5 * dt * (prev_rate + rate_b);
      prev_rate = rate_b;
    }
    if (next_grid < rec.grid_samples.size() && rec.grid_samples[next_grid] == i + 1) {
      emit(i + 1);
      ++next_grid;
      ++grid_step;
    }
  }
  return out;
}

}  // namespace

BalanceReport ito_balance(BalanceKind kind, const SpdeProblem& problem, const Field& u0, const EnsembleConfig& config,
                          double order_constant) {
  if (config.record_stride != 1) throw std::invalid_argument("balance checks need record_stride 1");
  const auto times = record_times(config.horizon, config.scheme.dt, config.record_stride);
  BalanceEvaluator ev(kind, problem, times);
  const double near_level = config.threshold / 100.0;

  PathObserver obs;
  obs.channels = {"lhs", "rhs", "gap", "stat", "disc", "near", "phi"};
  obs.needs_fields = true;
  obs.evaluate = [&](const TrajectoryRecord& rec) { return evaluate_path(ev, rec, near_level); };
  const auto est = run_ensemble(config, problem, u0, &obs);

  BalanceReport r;
  r.identity = to_string(kind);
  r.inequality = ev.inequality();
  std::size_t window = 0;
  while (window < est.times.size() && est.channels[ch_near].count[window] > 0 &&
         est.channels[ch_near].mean[window] == 0.0 && est.blowup_fraction[window] == 0.0 &&
         est.channels[ch_gap].count[window] == est.paths - est.failed_paths)
    ++window;
  if (window < 2) {
    r.note = "pre-blow-up window has fewer than two record times";
    r.pass = false;
    return r;
  }

  double max_se = 0.0;
  for (std::size_t k = 0; k < window; ++k) {
    r.times.push_back(est.times[k]);
    r.lhs.push_back(est.channels[ch_lhs].mean[k]);
    r.rhs.push_back(est.channels[ch_rhs].mean[k]);
    r.gap.push_back(est.channels[ch_gap].mean[k]);
    r.gap_se.push_back(est.channels[ch_gap].se[k]);
    r.statistical.push_back(est.channels[ch_stat].mean[k]);
    r.discretization.push_back(est.channels[ch_disc].mean[k]);
    r.scale = std::max(r.scale, std::abs(est.channels[ch_phi].mean[k]));
    max_se = std::max(max_se, r.gap_se.back());
    const double gap = r.inequality ? std::max(0.0, -r.gap.back()) : std::abs(r.gap.back());
    r.max_abs_gap = std::max(r.max_abs_gap, gap);
    r.max_abs_discretization = std::max(r.max_abs_discretization, std::abs(r.discretization.back()));
  }
  r.tolerance = 3.0 * max_se + order_constant * config.scheme.dt * r.scale;
  r.pass = r.max_abs_gap <= r.tolerance;
  if (r.times.size() < est.times.size()) r.note = "window truncated before the horizon";
  r.theta_checks = ev.theta_checks();
  r.theta_max_residual = ev.theta_max_residual();
  r.remainder_nonnegative = ev.remainder_nonnegative();
  if (r.theta_checks > 0 && !(r.theta_max_residual <= 1e-10)) r.pass = false;
  if (!r.remainder_nonnegative) r.pass = false;
  return r;
}

BalanceReport ito_balance_l2(const SpdeProblem& problem, const Field& u0, const EnsembleConfig& config, double c) {
  return ito_balance(BalanceKind::l2, problem, u0, config, c);
}
BalanceReport ito_balance_grad(const SpdeProblem& problem, const Field& u0, const EnsembleConfig& config, double c) {
  return ito_balance(BalanceKind::grad, problem, u0, config, c);
}
BalanceReport ito_balance_lmp1(const SpdeProblem& problem, const Field& u0, const EnsembleConfig& config, double c) {
  return ito_balance(BalanceKind::lmp1, problem, u0, config, c);
}
BalanceReport ito_balance_multiplicative(const SpdeProblem& problem, const Field& u0, const EnsembleConfig& config,
                                         double c) {
  return ito_balance(BalanceKind::multiplicative, problem, u0, config, c);
}

ThetaResult taylor_remainder_theta(std::span<const double> u, std::span<const double> eta, double m, double weight) {
  if (u.size() != eta.size()) throw std::invalid_argument("u and eta must have the same size");
  if (!(m >= 1.0)) throw std::invalid_argument("taylor remainder needs m >= 1");
  ThetaResult r;
  if (std::all_of(eta.begin(), eta.end(), [](double x) { return x == 0.0; })) {
    r.found = true;
    return r;
  }
  double lhs = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    lhs += taylor_remainder(u[i], eta[i], m + 1.0);
  }
  lhs *= weight;
  r.lhs = lhs;
  const double c = 0.5 * m * (m + 1.0) * weight;
  auto g = [&](double theta) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += abs_pow(u[i] + theta * eta[i], m - 1.0) * eta[i] * eta[i];
    return c * s - lhs;
  };

  constexpr int scan = 1000;
  double lo = 0.0;
  double g_lo = g(0.0);
  if (g_lo == 0.0) {
    r.found = true;
    return r;
  }
  double hi = -1.0;
  for (int j = 1; j <= scan; ++j) {
    const double t = static_cast<double>(j) / scan;
    const double gt = g(t);
    if (gt == 0.0) {
      r.found = true;
      r.theta = t;
      return r;
    }
    if ((gt > 0.0) != (g_lo > 0.0)) {
      hi = t;
      break;
    }
    lo = t;
    g_lo = gt;
  }
  if (hi < 0.0) {
    r.residual = std::min(std::abs(g(0.0)), std::abs(g(1.0)));
    return r;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((gm > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = gm;
    } else {
      hi = mid;
    }
  }
  const double gl = std::abs(g(lo));
  const double gh = std::abs(g(hi));
  r.theta = gl <= gh ? lo : hi;
  r.residual = std::min(gl, gh);
  r.found = true;
  return r;
}

ThetaResult taylor_remainder_theta(const IntervalGrid& grid, std::span<const double> u,
                                   std::span<const double> eta, double m) {
  return taylor_remainder_theta(u, eta, m, grid.spacing());
}

ThetaSweepReport taylor_theta_property(std::size_t triples, std::uint64_t seed) {
  ThetaSweepReport r;
  r.triples = triples;
  RngStream rng(seed, 0, 7);
  for (std::size_t k = 0; k < triples; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 32.0) % 32;
    const double m = 1.0 + 5.0 * rng.uniform();
    const double scale = std::pow(10.0, -3.0 + 4.0 * rng.uniform());
    Field u(n), eta(n);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = 2.0 * rng.normal();
      eta[i] = scale * rng.normal();
    }
    const auto t = taylor_remainder_theta(u, eta, m, 1.0 / static_cast<double>(n + 1));
    const double rel = t.residual / std::max(1.0, std::abs(t.lhs));
    r.max_relative_residual = std::max(r.max_relative_residual, rel);
    if (!t.found || !(rel <= 1e-10) || t.theta < 0.0 || t.theta > 1.0) ++r.failures;
  }
  r.pass = r.failures == 0;
  return r;
}

MomentLawReport scalar_second_moment_law(const MultiplicativeNoise& noise, const LevyMeasure& levy, double u0,
                                         std::span<const double> times, std::size_t paths, std::uint64_t seed,
                                         double dt, unsigned threads, double z) {
  if (times.empty()) throw std::invalid_argument("moment law needs check times");
  MomentLawReport r;
  r.name = noise.label();
  r.rate = 2.0 * kappa(noise, levy);

  // Two nodes with unit spacing and no diffusion: every node follows the same scalar SDE.
  SpdeProblem problem{IntervalGrid(3.0, 2), {0.0, 0.0, 1.0}, noise, levy};
  EnsembleConfig cfg;
  cfg.paths = paths;
  cfg.master_seed = seed;
  cfg.scheme.dt = dt;
  cfg.scheme.jump_mode = JumpMode::fixed_grid;
  cfg.horizon = *std::max_element(times.begin(), times.end());
  cfg.record_stride = 1;
  cfg.threshold = std::numeric_limits<double>::max();
  cfg.threads = threads;
  const auto est = run_ensemble(cfg, problem, Field{u0, u0});
  const double mass = 2.0 * problem.grid.spacing();

  r.pass = true;
  for (double t : times) {
    std::size_t k = 0;
    while (k < est.times.size() && std::abs(est.times[k] - t) > 1e-9 * std::max(1.0, t)) ++k;
    if (k == est.times.size()) throw std::invalid_argument("check time is not on the step grid");
    MomentLawCheck c;
    c.time = t;
    c.estimate = est.v.mean[k] / mass;
    c.se = est.v.se[k] / mass;
    c.expected = u0 * u0 * std::exp(r.rate * t);
    c.pass = std::abs(c.estimate - c.expected) <= z * c.se || c.estimate == c.expected;
    r.pass = r.pass && c.pass;
    r.checks.push_back(c);
  }
  return r;
}

namespace {

struct SampleStats {
  double mean = 0.0, se = 0.0, var = 0.0, var_se = 0.0;
};

SampleStats sample_stats(const std::vector<double>& x) {
  SampleStats s;
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return s;
  for (double v : x) s.mean += v;
  s.mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - s.mean) * (v - s.mean);
    m2 += d;
    m4 += d * d;
  }
  s.var = m2 / (n - 1.0);
  s.se = std::sqrt(s.var / n);
  m4 /= n;
  s.var_se = std::sqrt(std::max(0.0, m4 - s.var * s.var) / n);
  return s;
}

MartingaleCheck make_check(std::string name, double t, const std::vector<double>& x, double var_expected, double z) {
  MartingaleCheck c;
  c.name = std::move(name);
  c.time = t;
  const auto s = sample_stats(x);
  c.mean = s.mean;
  c.se = s.se;
  c.variance = s.var;
  c.variance_expected = var_expected;
  c.variance_se = s.var_se;
  c.mean_pass = s.se > 0.0 ? std::abs(s.mean) <= z * s.se : s.mean == 0.0;
  c.variance_pass = s.var_se > 0.0 ? std::abs(s.var - var_expected) <= z * s.var_se
                                   : std::abs(s.var - var_expected) <= 1e-12 * std::max(1.0, var_expected);
  return c;
}

}  // namespace

MartingaleReport martingale_checks(const LevyMeasure& levy, const AdditiveNoise& noise, const IntervalGrid& grid,
                                   const Field& frozen, std::span<const double> times, std::size_t streams,
                                   std::uint64_t seed, double dt, double z) {
  if (times.empty()) throw std::invalid_argument("martingale checks need check times");
  if (frozen.size() != grid.size()) throw std::invalid_argument("frozen field does not match the grid");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  std::vector<double> checks(times.begin(), times.end());
  std::sort(checks.begin(), checks.end());
  const double T = checks.back();
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  std::vector<std::size_t> check_step;
  for (double t : checks) {
    const double r = t / dt;
    if (std::abs(r - std::round(r)) > 1e-6) throw std::invalid_argument("check time is not on the step grid");
    check_step.push_back(static_cast<std::size_t>(std::llround(r)));
  }

  const double rate = levy.total_rate();
  auto g = [&](double s, double zz) {
    if (!noise.has_eta()) return zz;
    return inner(grid, frozen, noise.eta_field(grid, s, zz));
  };
  const auto pair_sigma = [&](double s) { return noise.has_sigma() ? inner(grid, noise.sigma_field(grid, s), frozen) : 0.0; };
  std::vector<double> sig(steps);
  for (std::size_t k = 0; k < steps; ++k) sig[k] = pair_sigma(static_cast<double>(k) * dt);

  // Closed-form compensators and variances at each check time.
  std::vector<double> comp(checks.size(), 0.0), comp_var(checks.size(), 0.0), bm_var(checks.size(), 0.0);
  for (std::size_t c = 0; c < checks.size(); ++c) {
    if (!levy.is_zero()) {
      comp[c] = integrate_adaptive([&](double s) { return levy.integrate([&](double zz) { return g(s, zz); }); },
                                   0.0, checks[c], 1e-10, 1e-14).value;
      comp_var[c] = integrate_adaptive(
                        [&](double s) {
                          return levy.integrate([&](double zz) {
                            const double v = g(s, zz);
                            return v * v;
                          });
                        },
                        0.0, checks[c], 1e-10, 1e-14)
                        .value;
    }
    if (noise.has_sigma())
      bm_var[c] = integrate_adaptive(
                      [&](double s) {
                        const double v = pair_sigma(s);
                        return v * v;
                      },
                      0.0, checks[c], 1e-10, 1e-14)
                      .value;
  }

  std::vector<std::vector<double>> count(checks.size()), jump_int(checks.size()), bm(checks.size());
  for (auto* v : {&count, &jump_int, &bm})
    for (auto& x : *v) x.reserve(streams);
  for (std::size_t i = 0; i < streams; ++i) {
    RngStream jr(seed, i, 1);
    RngStream br(seed, i, 0);
    const auto jumps = levy.is_zero() ? std::vector<JumpEvent>{} : levy.sample_jumps(T, jr);
    std::size_t j = 0;
    double n = 0.0, s = 0.0;
    double w = 0.0;
    std::size_t k = 0;
    for (std::size_t c = 0; c < checks.size(); ++c) {
      while (j < jumps.size() && jumps[j].time <= checks[c]) {
        n += 1.0;
        s += g(jumps[j].time, jumps[j].mark);
        ++j;
      }
      for (; k < check_step[c]; ++k) {
        const double dw = std::sqrt(dt) * br.normal();
        w += sig[k] * dw;
      }
      count[c].push_back(n - checks[c] * rate);
      jump_int[c].push_back(s - comp[c]);
      bm[c].push_back(w);
    }
  }

  MartingaleReport r;
  r.pass = true;
  for (std::size_t c = 0; c < checks.size(); ++c) {
    r.checks.push_back(make_check("compensated_count", checks[c], count[c], checks[c] * rate, z));
    r.checks.push_back(make_check("compensated_jump_integral", checks[c], jump_int[c], comp_var[c], z));
    r.checks.push_back(make_check("brownian_integral", checks[c], bm[c], bm_var[c], z));
  }
  for (const auto& c : r.checks) r.pass = r.pass && c.mean_pass && c.variance_pass;
  return r;
}

IntervalGrid refine_grid(const IntervalGrid& grid, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("refinement factor must be positive");
  return IntervalGrid(grid.length(), factor * (grid.size() + 1) - 1);
}

TrajectoryRecord reference_solve(const ModelParams& params, const std::function<double(double)>& u0,
                                 const IntervalGrid& fine_grid, double dt_fine, double horizon, double threshold,
                                 std::size_t record_stride) {
  SpdeProblem problem{fine_grid, params, AdditiveNoise::none(), LevyMeasure{}};
  StepScheme scheme;
  scheme.dt = dt_fine;
  scheme.jump_mode = JumpMode::fixed_grid;
  PathOptions opts;
  opts.horizon = horizon;
  opts.threshold = threshold;
  opts.record_stride = record_stride;
  return simulate_path(problem, fine_grid.sample(u0), scheme, opts, 0, 0);
}

std::optional<std::size_t> check_jump_log(const TrajectoryRecord& record) {
  std::size_t n = 0;
  for (const auto& j : record.jumps) {
    if (std::isnan(j.pre_l2sq)) continue;
    if (j.pre_sample + 1 >= record.samples.size()) return std::nullopt;
    const auto& pre = record.samples[j.pre_sample];
    const auto& post = record.samples[j.pre_sample + 1];
    if (pre.l2sq != j.pre_l2sq || post.l2sq != j.post_l2sq || pre.time != j.time || post.time != j.time)
      return std::nullopt;
    ++n;
  }
  return n;
}

}  // namespace stochblow
