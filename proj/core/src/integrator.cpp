#include "stochblow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stochblow {

void validate_model(const ModelParams& p, bool theorem_hypotheses) {
  if (theorem_hypotheses) {
    if (!(p.alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (!(p.beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    if (!(p.m > 1.0)) throw std::invalid_argument("m must be > 1");
  } else {
    if (!(p.alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    if (!(p.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    if (!(p.m >= 1.0)) throw std::invalid_argument("m must be >= 1");
  }
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.m))
    throw std::invalid_argument("model parameters must be finite");
}

const char* to_string(JumpMode mode) {
  return mode == JumpMode::fixed_grid ? "fixed_grid" : "jump_adapted";
}

double signed_power(double u, double m) {
  if (m == 3.0) return u * u * u;
  if (m == 2.0) return u * std::abs(u);
  if (m == 1.0) return u;
  if (m == 5.0) {
    const double u2 = u * u;
    return u2 * u2 * u;
  }
  return std::copysign(std::pow(std::abs(u), m), u);
}

SemiImplicitStepper::SemiImplicitStepper(const SpdeProblem& problem)
    : problem_(problem), rhs_(problem.grid.size()), jump_work_(problem.grid.size()) {
  validate_model(problem.params, false);
  if (const auto* mul = std::get_if<MultiplicativeNoise>(&problem.noise)) {
    if (!problem.levy.is_zero()) eta_mean_ = problem.levy.integrate([&](double z) { return mul->eta(z); });
  }
}

const ImplicitHeatSolver& SemiImplicitStepper::solver_for(double dt) {
  const double c = dt * problem_.params.alpha;
  for (const auto& s : solvers_)
    if (s.coefficient() == c) return s;
  if (solvers_.size() > 96) solvers_.clear();  // jump-adapted runs see many distinct step sizes
  solvers_.emplace_back(problem_.grid, c);
  return solvers_.back();
}

double SemiImplicitStepper::guard_value(std::span<const double> u, double dt) const {
  const auto& p = problem_.params;
  if (p.beta == 0.0) return 0.0;
  const double sup = norm_sup(u);
  if (!std::isfinite(sup)) return std::numeric_limits<double>::infinity();
  return dt * p.beta * (p.m == 3.0 ? sup * sup : std::pow(sup, p.m - 1.0));
}

void SemiImplicitStepper::jump_increment(std::span<const double> u_minus, double t, double z,
                                         std::span<double> out) const {
  const auto& grid = problem_.grid;
  if (const auto* add = std::get_if<AdditiveNoise>(&problem_.noise)) {
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = add->eta_at(grid.node(i), t, z);
  } else {
    const double e = std::get<MultiplicativeNoise>(problem_.noise).eta(z);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = e * u_minus[i];
  }
}

void SemiImplicitStepper::step(std::span<const double> u, double t, double dt, double dW,
                               std::span<const JumpEvent> jumps, std::span<double> out) {
  const auto& grid = problem_.grid;
  const auto& p = problem_.params;
  const std::size_t n = grid.size();

  for (std::size_t i = 0; i < n; ++i) rhs_[i] = u[i];
  if (p.beta != 0.0)
    for (std::size_t i = 0; i < n; ++i) rhs_[i] += dt * p.beta * signed_power(u[i], p.m);

  if (const auto* add = std::get_if<AdditiveNoise>(&problem_.noise)) {
    if (add->has_sigma() && dW != 0.0)
      for (std::size_t i = 0; i < n; ++i) rhs_[i] += add->sigma_at(grid.node(i), t) * dW;
    if (add->has_eta() && !problem_.levy.is_zero()) {
      for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.node(i);
        double comp = 0.0;
        for (const auto& [z, w] : problem_.levy.rule()) comp += w * add->eta_at(x, t, z);
        rhs_[i] -= dt * comp;
      }
      for (const auto& jump : jumps)
        for (std::size_t i = 0; i < n; ++i) rhs_[i] += add->eta_at(grid.node(i), t, jump.mark);
    }
  } else {
    const auto& mul = std::get<MultiplicativeNoise>(problem_.noise);
    double factor = mul.sigma() * dW - dt * eta_mean_;
    for (const auto& jump : jumps) factor += mul.eta(jump.mark);
    if (factor != 0.0)
      for (std::size_t i = 0; i < n; ++i) rhs_[i] += factor * u[i];
  }

  if (p.alpha == 0.0) {
    std::copy(rhs_.begin(), rhs_.end(), out.begin());
  } else {
    solver_for(dt).solve(rhs_, out);
  }
}

Field step(const SpdeProblem& problem, std::span<const double> u, double t, double dt, double dW,
           std::span<const JumpEvent> jumps) {
  SemiImplicitStepper stepper(problem);
  Field out(u.size());
  stepper.step(u, t, dt, dW, jumps, out);
  return out;
}

BrownianPath::BrownianPath(double fine_dt, std::size_t steps, RngStream& rng) : fine_dt_(fine_dt), w_(steps + 1) {
  if (!(fine_dt > 0.0)) throw std::invalid_argument("Brownian path step must be positive");
  const double s = std::sqrt(fine_dt);
  w_[0] = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) w_[k] = w_[k - 1] + s * rng.normal();
}

bool BrownianPath::aligned(double t) const {
  const double r = t / fine_dt_;
  return std::abs(r - std::round(r)) < 1e-6 && std::round(r) < static_cast<double>(w_.size());
}

std::size_t BrownianPath::index(double t) const {
  if (!aligned(t)) throw std::invalid_argument("time is not on the shared Brownian grid");
  return static_cast<std::size_t>(std::llround(t / fine_dt_));
}

double BrownianPath::increment(double t0, double t1) const { return w_[index(t1)] - w_[index(t0)]; }

namespace {

class PathRunner {
 public:
  PathRunner(const SpdeProblem& problem, const StepScheme& scheme, const PathOptions& options, std::uint64_t seed,
             std::uint64_t path_index)
      : problem_(problem),
        scheme_(scheme),
        options_(options),
        stepper_(problem),
        brownian_rng_(seed, path_index, 0),
        jump_rng_(seed, path_index, 1),
        bridge_rng_(seed, path_index, 2),
        next_(problem.grid.size()),
        jump_(problem.grid.size()) {}

  TrajectoryRecord run(const Field& u0) {
    const auto& grid = problem_.grid;
    if (u0.size() != grid.size()) throw std::invalid_argument("initial field does not match the grid");
    for (double x : u0)
      if (!std::isfinite(x)) throw std::invalid_argument("initial field must be finite");
    if (!(scheme_.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(options_.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (options_.record_stride == 0) throw std::invalid_argument("record_stride must be >= 1");

    const double T = options_.horizon;
    const double dt = scheme_.dt;
    const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    record_.dt = dt;
    record_.record_stride = options_.record_stride;

    std::vector<JumpEvent> sampled;
    const std::vector<JumpEvent>* jumps = options_.jumps;
    if (!jumps) {
      if (!problem_.levy.is_zero()) sampled = problem_.levy.sample_jumps(T, jump_rng_);
      jumps = &sampled;
    }
    if (options_.brownian && scheme_.jump_mode == JumpMode::jump_adapted && !jumps->empty())
      throw std::invalid_argument("a shared Brownian path requires fixed_grid mode when jumps are present");

    u_ = u0;
    push_sample(0.0, false);
    record_.grid_samples.push_back(0);

    std::size_t next_jump = 0;
    for (std::size_t k = 0; k < steps && !record_.blowup.detected; ++k) {
      const double t0 = static_cast<double>(k) * dt;
      const double t1 = (k + 1 == steps) ? T : static_cast<double>(k + 1) * dt;
      step_index_ = k;
      if (scheme_.jump_mode == JumpMode::fixed_grid) {
        const std::size_t first = next_jump;
        while (next_jump < jumps->size() && (*jumps)[next_jump].time <= t1) ++next_jump;
        std::span<const JumpEvent> in_step(jumps->data() + first, next_jump - first);
        for (const auto& j : in_step)
          record_.jumps.push_back({j.time, j.mark, std::nan(""), std::nan(""), record_.samples.size() - 1, k});
        advance(t0, t1, brownian(t0, t1), in_step, 0);
      } else {
        double cursor = t0;
        while (next_jump < jumps->size() && (*jumps)[next_jump].time <= t1 && !record_.blowup.detected) {
          const JumpEvent& j = (*jumps)[next_jump++];
          if (j.time > cursor) advance(cursor, j.time, brownian(cursor, j.time), {}, 0);
          if (record_.blowup.detected) break;
          apply_jump(j, k);
          cursor = j.time;
        }
        if (!record_.blowup.detected && cursor < t1) advance(cursor, t1, brownian(cursor, t1), {}, 0);
      }
      if (record_.blowup.detected) break;
      if ((k + 1) % options_.record_stride == 0 || k + 1 == steps) {
        push_sample(t1, false);
        record_.grid_samples.push_back(record_.samples.size() - 1);
      }
    }
    return std::move(record_);
  }

 private:
  double brownian(double t0, double t1) {
    double dw;
    if (options_.brownian) {
      dw = options_.brownian->increment(t0, t1);
    } else {
      dw = std::sqrt(t1 - t0) * brownian_rng_.normal();
    }
    w_ += dw;
    return dw;
  }

  void push_sample(double t, bool jump) {
    const auto& grid = problem_.grid;
    record_.samples.push_back({t, norm_l2_sq(grid, u_), seminorm_h1_sq(grid, u_),
                               norm_lp_pow(grid, u_, problem_.params.m + 1.0), w_, jump});
    if (options_.store_fields) record_.snapshots.push_back(u_);
  }

  void declare_blowup(double t, const char* trigger) {
    record_.blowup = {true, t, trigger};
  }

  void check_state(double t) {
    const double l2sq = norm_l2_sq(problem_.grid, u_);
    if (!std::isfinite(l2sq)) {
      declare_blowup(t, "non_finite");
    } else if (std::sqrt(l2sq) >= options_.threshold) {
      declare_blowup(t, "threshold");
    }
  }

  void advance(double t0, double t1, double dW, std::span<const JumpEvent> jumps, int depth) {
    const double len = t1 - t0;
    if (stepper_.guard_value(u_, len) > scheme_.guard) {
      if (depth >= scheme_.max_halvings) {
        declare_blowup(t0, "step_guard");
        return;
      }
      ++record_.halvings;
      const double mid = t0 + 0.5 * len;
      const double dw1 = 0.5 * dW + 0.5 * std::sqrt(len) * bridge_rng_.normal();
      auto split = std::partition_point(jumps.begin(), jumps.end(), [&](const JumpEvent& j) { return j.time <= mid; });
      const auto n1 = static_cast<std::size_t>(split - jumps.begin());
      advance(t0, mid, dw1, jumps.first(n1), depth + 1);
      if (record_.blowup.detected) return;
      advance(mid, t1, dW - dw1, jumps.subspan(n1), depth + 1);
      return;
    }
    stepper_.step(u_, t0, len, dW, jumps, next_);
    u_.swap(next_);
    check_state(t1);
  }

  void apply_jump(const JumpEvent& j, std::size_t k) {
    push_sample(j.time, true);
    const std::size_t pre = record_.samples.size() - 1;
    stepper_.jump_increment(u_, j.time, j.mark, jump_);
    for (std::size_t i = 0; i < u_.size(); ++i) u_[i] += jump_[i];
    push_sample(j.time, true);
    record_.jumps.push_back({j.time, j.mark, record_.samples[pre].l2sq, record_.samples.back().l2sq, pre, k});
    check_state(j.time);
  }

  const SpdeProblem& problem_;
  const StepScheme& scheme_;
  const PathOptions& options_;
  SemiImplicitStepper stepper_;
  RngStream brownian_rng_;
  RngStream jump_rng_;
  RngStream bridge_rng_;
  Field u_;
  Field next_;
  Field jump_;
  double w_ = 0.0;
  std::size_t step_index_ = 0;
  TrajectoryRecord record_;
};

}  // namespace

TrajectoryRecord simulate_path(const SpdeProblem& problem, const Field& u0, const StepScheme& scheme,
                               const PathOptions& options, std::uint64_t seed, std::uint64_t path_index) {
  return PathRunner(problem, scheme, options, seed, path_index).run(u0);
}

}  // namespace stochblow
