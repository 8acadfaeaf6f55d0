#include <cmath>
#include <numbers>

#include "doctest.h"
#include "stochblow/oracles.hpp"

using namespace stochblow;
using std::numbers::pi;

namespace {

EnsembleConfig balance_config(std::size_t paths, double dt, double horizon) {
  EnsembleConfig c;
  c.paths = paths;
  c.scheme = StepScheme{dt, JumpMode::fixed_grid};
  c.horizon = horizon;
  c.record_stride = 1;
  return c;
}

}  // namespace

TEST_SUITE("verification_oracles") {
  TEST_CASE("scalar Taylor remainder") {
    const std::vector<double> u{1.0}, eta{1.0};
    const auto r = taylor_remainder_theta(u, eta, 3.0);
    REQUIRE(r.found);
    CHECK(r.lhs == doctest::Approx(11.0));
    CHECK(std::abs(r.theta - (std::sqrt(11.0 / 6.0) - 1.0)) <= 1e-9);
    CHECK(r.theta == doctest::Approx(0.3540).epsilon(1e-3));
  }

  TEST_CASE("zero jump gives theta zero") {
    const std::vector<double> u{0.3, -1.0, 2.0}, eta{0.0, 0.0, 0.0};
    const auto r = taylor_remainder_theta(u, eta, 2.5);
    CHECK(r.found);
    CHECK(r.theta == 0.0);
    CHECK(r.lhs == 0.0);
  }

  TEST_CASE("tiny jumps keep a small residual") {
    const std::vector<double> u{1.0}, eta{1e-6};
    const auto r = taylor_remainder_theta(u, eta, 3.0);
    CHECK(r.found);
    CHECK(r.residual <= 1e-10 * std::max(1.0, std::abs(r.lhs)));
  }

  TEST_CASE("randomized remainder triples") {
    const auto rep = taylor_theta_property(1000, 99);
    CHECK(rep.triples == 1000);
    CHECK(rep.failures == 0);
    CHECK(rep.max_relative_residual <= 1e-10);
    CHECK(rep.pass);
  }

  TEST_CASE("martingale and isometry checks on a frozen field") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 2.0}}}};
    const IntervalGrid g(1.0, 19);
    const auto noise = AdditiveNoise::decaying_sine(1.0, 0.5, 1.0, 1, 1.0, 50.0);
    const auto u = g.sample([](double x) { return std::sin(pi * x); });
    const std::vector<double> times{0.5, 1.0};
    const auto rep = martingale_checks(atom, noise, g, u, times, 10000, 7, 1e-3);
    CHECK(rep.checks.size() == 6);
    for (const auto& c : rep.checks) {
      INFO(c.name << " t=" << c.time);
      CHECK(c.mean_pass);
      CHECK(c.variance_pass);
    }
    CHECK(rep.pass);
  }

  TEST_CASE("martingale checks with zero noise are identically zero") {
    const IntervalGrid g(1.0, 9);
    const std::vector<double> times{1.0};
    const auto rep = martingale_checks(LevyMeasure(), AdditiveNoise::none(), g, Field(9, 1.0), times, 100, 1, 1e-2);
    for (const auto& c : rep.checks) {
      CHECK(c.mean == 0.0);
      CHECK(c.variance == 0.0);
    }
  }

  TEST_CASE("second-moment law of the scalar multiplicative equation") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 2.0}}}};
    const std::vector<double> times{0.5, 1.0};
    const MultiplicativeNoise brown(0.5, nullptr, LevyMeasure());
    const auto b = scalar_second_moment_law(brown, LevyMeasure(), 1.0, times, 20000, 3, 1e-3);
    CHECK(b.rate == doctest::Approx(0.25));
    CHECK(b.pass);
    const MultiplicativeNoise jump(0.0, [](double z) { return 0.3 * z; }, atom);
    const auto j = scalar_second_moment_law(jump, atom, 1.0, times, 20000, 4, 1e-3);
    CHECK(j.rate == doctest::Approx(0.18));
    CHECK(j.pass);
  }

  TEST_CASE("deterministic heat balance closes at first order") {
    const SpdeProblem p{IntervalGrid(1.0, 49), ModelParams{1.0, 0.0, 3.0}, AdditiveNoise::none(), LevyMeasure()};
    const auto u0 = p.grid.sample([](double x) { return std::sin(pi * x); });
    const auto a = ito_balance_l2(p, u0, balance_config(1, 2e-3, 0.1));
    const auto b = ito_balance_l2(p, u0, balance_config(1, 1e-3, 0.1));
    CHECK(a.pass);
    CHECK(b.pass);
    CHECK(a.max_abs_gap / b.max_abs_gap == doctest::Approx(2.0).epsilon(0.15));
    for (double s : b.statistical) CHECK(s == 0.0);
  }

  TEST_CASE("stochastic balances pass on small ensembles") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 2.0}}}};
    const SpdeProblem p{IntervalGrid(1.0, 31), ModelParams{1.0, 1.0, 3.0},
                        AdditiveNoise::decaying_sine(1.0, 0.5, 1.0, 1, 1.0, 50.0), atom};
    const auto u0 = p.grid.sample([](double x) { return std::sin(pi * x); });
    const auto cfg = balance_config(200, 1e-3, 0.2);
    for (auto kind : {BalanceKind::l2, BalanceKind::grad, BalanceKind::lmp1}) {
      const auto r = ito_balance(kind, p, u0, cfg);
      INFO(to_string(kind) << " gap " << r.max_abs_gap << " tol " << r.tolerance);
      CHECK(r.pass);
    }
    const auto lmp1 = ito_balance_lmp1(p, u0, cfg);
    CHECK(lmp1.theta_checks > 0);
    CHECK(lmp1.theta_max_residual <= 1e-10);
    CHECK(lmp1.remainder_nonnegative);
  }

  TEST_CASE("multiplicative balances") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 2.0}}}};
    const MultiplicativeNoise mul(0.8, [](double z) { return 0.4 * z; }, atom);
    const SpdeProblem p{IntervalGrid(1.0, 31), ModelParams{1.0, 1.0, 3.0}, mul, atom};
    const auto u0 = p.grid.sample([](double x) { return 2.0 * std::sin(pi * x); });
    const auto cfg = balance_config(200, 1e-3, 0.2);
    const auto m = ito_balance_multiplicative(p, u0, cfg);
    CHECK(m.pass);
    const auto ineq = ito_balance_lmp1(p, u0, cfg);
    CHECK(ineq.inequality);
    CHECK(ineq.pass);
  }

  TEST_CASE("reference solve on the heat preset") {
    const IntervalGrid coarse(1.0, 24);
    const auto fine = refine_grid(coarse);
    CHECK(fine.size() == 99);
    CHECK(fine.spacing() == doctest::Approx(coarse.spacing() / 4));
    const auto rec = reference_solve({1.0, 0.0, 3.0}, [](double x) { return std::sin(pi * x); }, fine, 1e-5, 0.1,
                                     1e8, 1000);
    CHECK_FALSE(rec.blowup.detected);
    CHECK(rec.samples.back().l2sq == doctest::Approx(std::exp(-2 * pi * pi * 0.1) / 2).epsilon(2e-3));
  }

  TEST_CASE("jump log check rejects a tampered record") {
    const LevyMeasure atom{FiniteAtoms{{{1.0, 5.0}}}};
    const SpdeProblem p{IntervalGrid(1.0, 9), ModelParams{1.0, 1.0, 3.0},
                        AdditiveNoise::decaying_sine(0.0, 1.0, 0.0, 1, 1.0, 50.0), atom};
    PathOptions o;
    o.horizon = 1.0;
    auto rec = simulate_path(p, Field(9, 0.1), StepScheme{1e-2, JumpMode::jump_adapted}, o, 1, 0);
    REQUIRE_FALSE(rec.jumps.empty());
    CHECK(check_jump_log(rec).value() == rec.jumps.size());
    rec.jumps[0].post_l2sq += 1e-12;
    CHECK_FALSE(check_jump_log(rec).has_value());
  }
}
