#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "doctest.h"
#include "stochblow/ensemble.hpp"

using namespace stochblow;
using std::numbers::pi;

namespace {

SpdeProblem problem(std::size_t n, double beta, NoiseModel noise, LevyMeasure levy = {}) {
  return SpdeProblem{IntervalGrid(1.0, n), ModelParams{1.0, beta, 3.0}, std::move(noise), std::move(levy)};
}

Field sine(const IntervalGrid& g, double c) {
  return g.sample([&](double x) { return c * std::sin(pi * x); });
}

EnsembleConfig config(std::size_t paths, double dt, double horizon, std::size_t stride) {
  EnsembleConfig c;
  c.paths = paths;
  c.scheme = StepScheme{dt, JumpMode::fixed_grid};
  c.horizon = horizon;
  c.record_stride = stride;
  return c;
}

}  // namespace

TEST_SUITE("monte_carlo") {
  TEST_CASE("record times") {
    const auto t = record_times(1.0, 0.01, 10);
    REQUIRE(t.size() == 11);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == doctest::Approx(1.0));
  }

  TEST_CASE("linear additive mean square matches the exact discrete moment recursion") {
    // σ proportional to the discrete first eigenvector keeps every path in that mode:
    // X' = (X + a e^{-rt} ΔW)/(1 + dt λ), so E X² follows a scalar recursion.
    const double a = 3.0, r = 1.0, dt = 1e-3;
    const auto p = problem(31, 0.0, AdditiveNoise::decaying_sine(a, 0.0, r, 1, 1.0, 50.0));
    const double lambda = first_eigenvalue(p.grid);
    const auto est = run_ensemble(config(2000, dt, 0.5, 50), p, sine(p.grid, 1.0));
    double ex2 = 1.0;
    const double mass = 0.5;  // Σ h sin² on the grid
    std::size_t k = 0;
    for (int n = 0; n <= 500; ++n) {
      if (n % 50 == 0) {
        const double expect = mass * ex2;
        CHECK(std::abs(est.v.mean[k] - expect) <= 3.0 * est.v.se[k] + 1e-12);
        ++k;
      }
      const double s = a * std::exp(-r * n * dt);
      ex2 = (ex2 + s * s * dt) / ((1 + dt * lambda) * (1 + dt * lambda));
    }
  }

  TEST_CASE("zero noise gives zero standard error") {
    const auto p = problem(20, 1.0, AdditiveNoise::none());
    const auto est = run_ensemble(config(8, 1e-3, 0.05, 5), p, sine(p.grid, 1.0));
    for (std::size_t k = 0; k < est.times.size(); ++k) CHECK(est.v.se[k] == 0.0);
  }

  TEST_CASE("a single path reproduces simulate_path") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 2.0}}}};
    const auto p = problem(20, 1.0, AdditiveNoise::decaying_sine(1.0, 0.5, 1.0, 1, 1.0, 50.0), atom);
    auto cfg = config(1, 1e-3, 0.3, 10);
    cfg.master_seed = 42;
    const auto est = run_ensemble(cfg, p, sine(p.grid, 2.0));
    PathOptions o;
    o.horizon = 0.3;
    o.record_stride = 10;
    const auto rec = simulate_path(p, sine(p.grid, 2.0), cfg.scheme, o, 42, 0);
    REQUIRE(rec.grid_samples.size() == est.times.size());
    for (std::size_t k = 0; k < est.times.size(); ++k) {
      CHECK(est.v.mean[k] == rec.samples[rec.grid_samples[k]].l2sq);
      CHECK(est.g.mean[k] == rec.samples[rec.grid_samples[k]].h1sq);
    }
  }

  TEST_CASE("blow-up fraction is nondecreasing and censoring is explicit") {
    const auto p = problem(29, 1.0, AdditiveNoise::decaying_sine(4.0, 0.0, 1.0, 1, 1.0, 50.0));
    const auto est = run_ensemble(config(64, 1e-4, 0.05, 10), p, sine(p.grid, 5.5));
    for (std::size_t k = 1; k < est.blowup_fraction.size(); ++k)
      CHECK(est.blowup_fraction[k] >= est.blowup_fraction[k - 1]);
    CHECK(est.censored_count() == est.tau_samples().size());
    CHECK(est.tau_samples().size() > 0);
    const auto taus = est.tau_samples();
    CHECK(std::is_sorted(taus.begin(), taus.end()));
    for (std::size_t k = 0; k < est.times.size(); ++k) {
      const auto alive = static_cast<std::size_t>(
          std::count_if(est.outcomes.begin(), est.outcomes.end(),
                        [&](const PathOutcome& o) { return !o.blowup || o.tau > est.times[k]; }));
      CHECK(est.v.count[k] == alive);
    }
  }

  TEST_CASE("estimates do not depend on the thread count") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 2.0}}}};
    const auto p = problem(24, 1.0, AdditiveNoise::decaying_sine(2.0, 1.0, 1.0, 1, 1.0, 50.0), atom);
    auto cfg = config(37, 1e-4, 0.03, 20);
    cfg.scheme.jump_mode = JumpMode::jump_adapted;
    cfg.chunk = 5;
    const auto a = run_ensemble(cfg, p, sine(p.grid, 5.5));
    cfg.threads = 3;
    const auto b = run_ensemble(cfg, p, sine(p.grid, 5.5));
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t k = 0; k < a.times.size(); ++k) {
      CHECK(std::memcmp(&a.v.mean[k], &b.v.mean[k], sizeof(double)) == 0);
      CHECK(std::memcmp(&a.v.se[k], &b.v.se[k], sizeof(double)) == 0);
      CHECK(a.blowup_fraction[k] == b.blowup_fraction[k]);
    }
  }

  TEST_CASE("mean-square blow-up detection") {
    const auto p = problem(49, 1.0, AdditiveNoise::none());
    const auto big = run_ensemble(config(1, 5e-5, 0.05, 10), p, sine(p.grid, 6.0));
    const auto d = detect_mean_square_blowup(big, 1e12);
    REQUIRE(d.tau_ms.has_value());
    CHECK(*d.tau_ms == big.outcomes[0].tau);

    const auto small = run_ensemble(config(4, 1e-3, 1.0, 100), p, sine(p.grid, 0.5));
    CHECK_FALSE(detect_mean_square_blowup(small, 1e12).tau_ms.has_value());
  }

  TEST_CASE("quadrupling the path count halves the standard error") {
    const auto p = problem(15, 0.0, AdditiveNoise::decaying_sine(2.0, 0.0, 1.0, 1, 1.0, 50.0));
    auto cfg = config(100, 1e-3, 0.2, 100);
    const std::vector<Refinement> rows{{1e-3, 15, 500}, {1e-3, 15, 2000}};
    const auto t = convergence_study(cfg, p, [](double x) { return std::sin(pi * x); }, rows, 0.2, 0.0);
    REQUIRE(t.order_kind.size() == 1);
    CHECK(t.order_kind[0] == "M");
    CHECK(t.observed_order[0] == doctest::Approx(0.5).epsilon(0.2));
    CHECK(t.rows[0].v_se / t.rows[1].v_se == doctest::Approx(2.0).epsilon(0.2));
  }

  TEST_CASE("spatial refinement on the heat preset is second order") {
    const auto p = problem(9, 0.0, AdditiveNoise::none());
    auto cfg = config(1, 1e-5, 0.1, 1000);
    const double exact = std::exp(-2 * pi * pi * 0.1) / 2;
    const std::vector<Refinement> rows{{1e-5, 9, 1}, {1e-5, 19, 1}};
    const auto t = convergence_study(cfg, p, [](double x) { return std::sin(pi * x); }, rows, 0.1, exact);
    CHECK(t.order_kind[0] == "h");
    CHECK(t.rows[0].error / t.rows[1].error == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("halving dt halves the weak error of the additive preset") {
    // small noise: the decay bias dominates and the exact moment recursion gives a ratio of 2.31
    const auto p = problem(15, 0.0, AdditiveNoise::decaying_sine(0.5, 0.0, 1.0, 1, 1.0, 50.0));
    auto cfg = config(200, 1e-2, 0.1, 1);
    const std::vector<Refinement> rows{{1.0 / 100, 15, 200}, {1.0 / 200, 15, 200}, {1.0 / 800, 15, 200}};
    const auto t = convergence_study(cfg, p, [](double x) { return std::sin(pi * x); }, rows, 0.1, std::nullopt);
    REQUIRE(t.order_kind.size() == 2);
    CHECK(t.order_kind[0] == "dt");
    CHECK(t.rows[0].error / t.rows[1].error == doctest::Approx(7.0 / 3.0).epsilon(0.25));
    MESSAGE("paired weak-error ratio " << t.rows[0].error / t.rows[1].error);
  }
}
