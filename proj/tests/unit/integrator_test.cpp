#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "stochblow/integrator.hpp"
#include "stochblow/oracles.hpp"

using namespace stochblow;
using std::numbers::pi;

namespace {

SpdeProblem heat(std::size_t n, double beta = 0.0, NoiseModel noise = AdditiveNoise::none(), LevyMeasure levy = {}) {
  return SpdeProblem{IntervalGrid(1.0, n), ModelParams{1.0, beta, 3.0}, std::move(noise), std::move(levy)};
}

Field sine(const IntervalGrid& g, double c, int k = 1) {
  return g.sample([&](double x) { return c * std::sin(k * pi * x); });
}

}  // namespace

TEST_SUITE("spde_integrator") {
  TEST_CASE("signed power") {
    CHECK(signed_power(-2.0, 3.0) == -8.0);
    CHECK(signed_power(-2.0, 2.0) == -4.0);
    CHECK(signed_power(2.0, 1.5) == doctest::Approx(std::pow(2.0, 1.5)));
    CHECK(signed_power(-2.0, 2.5) == doctest::Approx(-std::pow(2.0, 2.5)));
  }

  TEST_CASE("model validation") {
    CHECK_THROWS(validate_model({1.0, 1.0, 0.5}, false));
    CHECK_THROWS(validate_model({-1.0, 1.0, 3.0}, false));
    CHECK_NOTHROW(validate_model({1.0, 0.0, 1.0}, false));
    CHECK_THROWS(validate_model({1.0, 0.0, 3.0}, true));
    CHECK_THROWS(validate_model({1.0, 1.0, 1.0}, true));
  }

  TEST_CASE("linear steps are exact decay on the discrete eigenvector") {
    const auto p = heat(31);
    const double lambda = first_eigenvalue(p.grid);
    const double dt = 1e-3;
    Field u = first_eigenvector(p.grid);
    const Field u0 = u;
    for (int k = 1; k <= 50; ++k) {
      u = step(p, u, (k - 1) * dt, dt, 0.0);
      const double factor = std::pow(1.0 + dt * lambda, -k);
      for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(factor * u0[i]).epsilon(1e-11));
    }
  }

  TEST_CASE("heat decay matches the analytic solution") {
    double prev = 0.0;
    for (double dt : {2e-4, 1e-4}) {
      const auto p = heat(199);
      PathOptions o;
      o.horizon = 1.0;
      o.record_stride = 100;
      const auto rec = simulate_path(p, sine(p.grid, 1.0), StepScheme{dt, JumpMode::fixed_grid}, o, 1, 0);
      const double exact = std::exp(-2 * pi * pi) / 2;
      const double rel = std::abs(rec.samples.back().l2sq - exact) / exact;
      CHECK(rec.samples.back().time == doctest::Approx(1.0));
      CHECK(rel < 0.05);
      if (prev > 0.0) CHECK(prev / rel == doctest::Approx(2.0).epsilon(0.1));
      prev = rel;
    }
  }

  TEST_CASE("zero data and zero noise stay zero") {
    const auto p = heat(20, 1.0);
    PathOptions o;
    o.horizon = 0.1;
    const auto rec = simulate_path(p, Field(20, 0.0), StepScheme{1e-3}, o, 1, 0);
    CHECK_FALSE(rec.blowup.detected);
    for (const auto& s : rec.samples) CHECK(s.l2sq == 0.0);
  }

  TEST_CASE("linear deterministic runs dissipate energy") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n01;
    const auto p = heat(40);
    Field u(40);
    for (auto& v : u) v = n01(rng);
    PathOptions o;
    o.horizon = 0.05;
    const auto rec = simulate_path(p, u, StepScheme{1e-3, JumpMode::fixed_grid}, o, 1, 0);
    for (std::size_t k = 1; k < rec.samples.size(); ++k) CHECK(rec.samples[k].l2sq <= rec.samples[k - 1].l2sq);
  }

  TEST_CASE("focusing data blow up, small data decay") {
    const auto p = heat(49, 1.0);
    PathOptions o;
    o.horizon = 0.1;
    const auto big = simulate_path(p, sine(p.grid, 6.0), StepScheme{5e-5, JumpMode::fixed_grid}, o, 1, 0);
    CHECK(big.blowup.detected);
    CHECK(big.blowup.tau > 0.015);
    CHECK(big.blowup.tau < 0.025);

    o.horizon = 10.0;
    o.record_stride = 1000;
    o.store_fields = true;
    const auto small = simulate_path(p, sine(p.grid, 0.5), StepScheme{1e-3, JumpMode::fixed_grid}, o, 1, 0);
    CHECK_FALSE(small.blowup.detected);
    CHECK(small.samples.back().time == doctest::Approx(10.0));
    for (std::size_t k = 1; k < small.snapshots.size(); ++k)
      CHECK(norm_sup(small.snapshots[k]) < norm_sup(small.snapshots[k - 1]));
  }

  TEST_CASE("guard halving engages near blow-up") {
    const auto p = heat(49, 1.0);
    PathOptions o;
    o.horizon = 0.1;
    const auto rec = simulate_path(p, sine(p.grid, 6.0), StepScheme{1e-3, JumpMode::fixed_grid}, o, 1, 0);
    CHECK(rec.blowup.detected);
    CHECK(rec.halvings > 0);
  }

  TEST_CASE("paths are reproducible from (seed, index)") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 2.0}}}};
    const auto p = heat(30, 1.0, AdditiveNoise::decaying_sine(1.0, 0.5, 1.0, 1, 1.0, 50.0), atom);
    PathOptions o;
    o.horizon = 0.2;
    const StepScheme s{1e-3, JumpMode::jump_adapted};
    const auto a = simulate_path(p, sine(p.grid, 1.0), s, o, 5, 3);
    const auto b = simulate_path(p, sine(p.grid, 1.0), s, o, 5, 3);
    const auto c = simulate_path(p, sine(p.grid, 1.0), s, o, 5, 4);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k].l2sq == b.samples[k].l2sq);
    CHECK(a.samples.back().l2sq != c.samples.back().l2sq);
  }

  TEST_CASE("strong order with shared Brownian increments") {
    const auto p = heat(31, 1.0, AdditiveNoise::decaying_sine(2.0, 0.0, 1.0, 1, 1.0, 50.0));
    const double T = 0.25, fine = 1.0 / 4096;
    const auto u0 = sine(p.grid, 1.0);
    std::vector<double> err(3, 0.0);
    const std::vector<double> dts{1.0 / 256, 1.0 / 512, 1.0 / 1024};
    for (std::uint64_t path = 0; path < 20; ++path) {
      RngStream rng(17, path, 3);
      BrownianPath w(fine, static_cast<std::size_t>(std::llround(T / fine)), rng);
      PathOptions o;
      o.horizon = T;
      o.brownian = &w;
      o.store_fields = true;
      o.record_stride = 1u << 20;
      const auto ref = simulate_path(p, u0, StepScheme{fine, JumpMode::fixed_grid}, o, 17, path);
      for (std::size_t r = 0; r < dts.size(); ++r) {
        const auto rec = simulate_path(p, u0, StepScheme{dts[r], JumpMode::fixed_grid}, o, 17, path);
        Field d = rec.snapshots.back();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= ref.snapshots.back()[i];
        err[r] += norm_l2_sq(p.grid, d) / 20.0;
      }
    }
    for (std::size_t r = 0; r + 1 < dts.size(); ++r) {
      const double order = std::log2(std::sqrt(err[r] / err[r + 1]));
      MESSAGE("strong order estimate " << order);
      CHECK(order >= 0.5);
    }
  }

  TEST_CASE("jump log matches the field snapshots") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 2.0}, {-0.5, 3.0}}}};
    const auto noise = AdditiveNoise::decaying_sine(0.5, 1.0, 1.0, 2, 1.0, 50.0);
    const auto p = heat(25, 1.0, noise, atom);
    PathOptions o;
    o.horizon = 1.0;
    o.store_fields = true;
    const auto rec = simulate_path(p, sine(p.grid, 1.0), StepScheme{1e-3, JumpMode::jump_adapted}, o, 2, 0);
    REQUIRE(rec.jumps.size() > 0);
    REQUIRE(rec.snapshots.size() == rec.samples.size());
    const auto checked = check_jump_log(rec);
    REQUIRE(checked.has_value());
    CHECK(*checked == rec.jumps.size());
    for (const auto& j : rec.jumps) {
      const Field& pre = rec.snapshots[j.pre_sample];
      const Field& post = rec.snapshots[j.pre_sample + 1];
      Field expect = pre;
      const auto eta = noise.eta_field(p.grid, j.time, j.mark);
      for (std::size_t i = 0; i < pre.size(); ++i) expect[i] += eta[i];
      for (std::size_t i = 0; i < pre.size(); ++i) CHECK(post[i] == expect[i]);
      CHECK(j.post_l2sq - j.pre_l2sq == norm_l2_sq(p.grid, expect) - norm_l2_sq(p.grid, pre));
    }
  }

  TEST_CASE("multiplicative jumps use the pre-jump state") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 3.0}}}};
    const MultiplicativeNoise mul(0.0, [](double z) { return 0.5 * z; }, atom);
    const auto p = heat(15, 1.0, mul, atom);
    SemiImplicitStepper stepper(p);
    const auto u = sine(p.grid, 2.0);
    Field h(u.size());
    stepper.jump_increment(u, 0.1, 1.0, h);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(h[i] == doctest::Approx(0.5 * u[i]));
  }

  TEST_CASE("one step with jumps matches the scheme formula") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 2.0}}}};
    const auto noise = AdditiveNoise::decaying_sine(1.0, 1.0, 0.0, 1, 1.0, 50.0);
    const auto p = heat(9, 1.0, noise, atom);
    const double dt = 0.01, dW = 0.3;
    const auto u = sine(p.grid, 1.5);
    const std::vector<JumpEvent> jumps{{0.005, 1.0}};
    const auto out = step(p, u, 0.0, dt, dW, jumps);
    const auto sig = noise.sigma_field(p.grid, 0.0);
    const auto eta = noise.eta_field(p.grid, 0.0, 1.0);
    Field rhs(u.size());
    // compensator: dt·∫η dλ = dt·2·η(z=1)
    for (std::size_t i = 0; i < u.size(); ++i)
      rhs[i] = u[i] + dt * u[i] * u[i] * u[i] + sig[i] * dW + eta[i] - dt * 2.0 * eta[i];
    Field expect(u.size());
    ImplicitHeatSolver(p.grid, dt).solve(rhs, expect);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(out[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }

  TEST_CASE("shared Brownian path increments are additive") {
    RngStream rng(1, 0, 3);
    BrownianPath w(0.01, 100, rng);
    CHECK(w.increment(0.0, 0.5) + w.increment(0.5, 1.0) == doctest::Approx(w.increment(0.0, 1.0)).epsilon(1e-14));
    CHECK(w.aligned(0.37));
    CHECK_FALSE(w.aligned(0.375));
  }
}
