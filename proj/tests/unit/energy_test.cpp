#include <cmath>
#include <numbers>

#include "doctest.h"
#include "stochblow/energy.hpp"

using namespace stochblow;
using std::numbers::pi;

namespace {

const ModelParams kFocus{1.0, 1.0, 3.0};

double closed_lhs(double c) { return -pi * pi * c * c / 4 + 3 * c * c * c * c / 32; }

CriterionReport sine_criterion(double c, std::size_t n = 400, int k = 1) {
  const IntervalGrid g(1.0, n);
  const auto u = g.sample([&](double x) { return c * std::sin(k * pi * x); });
  return criterion_additive(u, kFocus, AdditiveNoise::none(), g, LevyMeasure());
}

}  // namespace

TEST_SUITE("energy_functionals") {
  TEST_CASE("concavity constants") {
    auto c3 = concavity_constants(3.0);
    CHECK(c3.epsilon == doctest::Approx(0.5));
    CHECK(c3.delta == doctest::Approx(1.0 / 6.0));
    CHECK(c3.gap == doctest::Approx(1.0));
    auto c1 = concavity_constants(1.0);
    CHECK(c1.epsilon == 0.0);
    CHECK(c1.delta == 0.0);
    CHECK(c1.gap == 0.0);
    auto c5 = concavity_constants(5.0);
    CHECK(c5.epsilon == doctest::Approx(1.0));
    CHECK(c5.delta == doctest::Approx(0.25));
    CHECK(c5.gap == doctest::Approx(2.0));
    CHECK_THROWS(concavity_constants(0.5));
  }

  TEST_CASE("parameter identity over a grid of exponents") {
    for (int i = 1; i <= 200; ++i) {
      const double m = 1.0 + 9.0 * i / 200.0;
      const auto c = concavity_constants(m);
      const double direct = 2 * (m + 1) - 4 * (1 + (m - 1) / 4) * (1 + (m - 1) / (2 * (m + 3)));
      CHECK(std::abs(direct - (m - 1) / 2) <= 1e-12);
      CHECK(std::abs(c.gap - (m - 1) / 2) <= 1e-12);
    }
  }

  TEST_CASE("additive zero-noise criterion on the sine mode") {
    const auto r6 = sine_criterion(6.0);
    CHECK(r6.lhs == doctest::Approx(closed_lhs(6.0)).epsilon(1e-3));
    CHECK(r6.lhs == doctest::Approx(32.67).epsilon(1e-3));
    CHECK(r6.verdict == Verdict::blowup_predicted);
    const auto r1 = sine_criterion(1.0);
    CHECK(r1.lhs == doctest::Approx(-2.373).epsilon(1e-3));
    CHECK(r1.verdict == Verdict::not_predicted);
    double sum = 0.0;
    for (const auto& c : r6.components) sum += c.value;
    CHECK(sum == doctest::Approx(r6.lhs));
  }

  TEST_CASE("zero data with noise is not predicted") {
    const IntervalGrid g(1.0, 100);
    const auto r = criterion_additive(Field(100, 0.0), kFocus, AdditiveNoise::decaying_sine(1.0, 0.0, 1.0, 1, 1.0, 50),
                                      g, LevyMeasure());
    CHECK(r.lhs < 0.0);
    CHECK(r.verdict == Verdict::not_predicted);
  }

  TEST_CASE("multiplicative criterion") {
    const IntervalGrid g(1.0, 200);
    const auto u = g.sample([](double x) { return 6.0 * std::sin(pi * x); });
    const MultiplicativeNoise none(0.0, nullptr, LevyMeasure());
    const auto r0 = criterion_multiplicative(u, kFocus, none, g, LevyMeasure());
    const auto ra = criterion_additive(u, kFocus, AdditiveNoise::none(), g, LevyMeasure());
    CHECK(r0.lhs == doctest::Approx(ra.lhs).epsilon(1e-14));
    CHECK(r0.kappa_window_ok.value());

    const MultiplicativeNoise loud(std::sqrt(20.0), nullptr, LevyMeasure());  // κ = 10 > π²
    const auto r10 = criterion_multiplicative(u, kFocus, loud, g, LevyMeasure());
    CHECK(r10.kappa == doctest::Approx(10.0));
    CHECK_FALSE(r10.kappa_window_ok.value());
    CHECK(r10.lhs > 0.0);
    CHECK(r10.verdict == Verdict::not_predicted);

    // κ term scales like s², the nonlinear term like s^{m+1}
    const MultiplicativeNoise mid(pi, nullptr, LevyMeasure());
    Field u2 = u;
    for (auto& v : u2) v *= 2.0;
    const auto a = criterion_multiplicative(u, kFocus, mid, g, LevyMeasure());
    const auto b = criterion_multiplicative(u2, kFocus, mid, g, LevyMeasure());
    CHECK(b.component("kappa") == doctest::Approx(4.0 * a.component("kappa")));
    CHECK(b.component("gradient") == doctest::Approx(4.0 * a.component("gradient")));
    CHECK(b.component("nonlinear") == doctest::Approx(16.0 * a.component("nonlinear")));
  }

  TEST_CASE("minimal K and the blow-up time bound") {
    const auto k = minimal_K(CriterionMode::additive, 32.67, 18.0, 0.0, 3.0);
    REQUIRE(k.has_value());
    CHECK(*k == doctest::Approx(3.0 * (7.0 / 6.0) * 324.0 / (8.0 * 32.67)));
    CHECK(*k == doctest::Approx(4.337).epsilon(1e-3));
    const auto km = minimal_K(CriterionMode::multiplicative, 54.88, 18.0, 0.0, 3.0);
    REQUIRE(km.has_value());
    CHECK(*km == doctest::Approx(2.583).epsilon(1e-3));
    CHECK_FALSE(minimal_K(CriterionMode::additive, -1.0, 18.0, 0.0, 3.0).has_value());
    CHECK_FALSE(minimal_K(CriterionMode::additive, 0.0, 18.0, 0.0, 3.0).has_value());

    CHECK(tstar_bound(4.337, 18.0, 1.0 / 6.0) == doctest::Approx(1.446).epsilon(1e-3));
    double prev = 0.0;
    for (double d : {0.1, 0.01, 0.001}) {
      const double b = tstar_bound(1.0, 1.0, d);
      CHECK(b > prev);
      prev = b;
    }
    const auto r = sine_criterion(6.0);
    REQUIRE(r.k_min.has_value());
    CHECK(*r.k_min == doctest::Approx(4.337).epsilon(2e-3));
    CHECK(r.tstar_bound.value() == doctest::Approx(*r.k_min / (r.delta * r.v0)));
  }

  TEST_CASE("criterion is increasing beyond the positive root, with a unique threshold") {
    double prev = -1e300;
    int flips = 0;
    bool last = false;
    for (int i = 0; i <= 160; ++i) {
      const double c = 0.05 * i;
      const auto r = sine_criterion(c, 200);
      const bool on = r.verdict == Verdict::blowup_predicted;
      if (i > 0 && on != last) ++flips;
      last = on;
      if (c > 4.0) {
        CHECK(r.lhs > prev);
        prev = r.lhs;
      }
    }
    CHECK(flips == 1);
  }

  TEST_CASE("sign-changing data") {
    const IntervalGrid g(1.0, 400);
    const double c = 6.0;
    const auto u = g.sample([&](double x) { return c * std::sin(2 * pi * x); });
    const auto r = criterion_additive(u, kFocus, AdditiveNoise::none(), g, LevyMeasure());
    CHECK(r.verdict != Verdict::not_evaluable);
    CHECK(norm_l2_sq(g, u) == doctest::Approx(c * c / 2).epsilon(1e-9));
    CHECK(norm_lp_pow(g, u, 4.0) == doctest::Approx(c * c * c * c * 3.0 / 8.0).epsilon(1e-9));
    CHECK(seminorm_h1_sq(g, u) == doctest::Approx(2 * pi * pi * c * c).epsilon(1e-4));
    CHECK(r.component("gradient") == doctest::Approx(-0.5 * seminorm_h1_sq(g, u)));
    CHECK(r.component("nonlinear") == doctest::Approx(0.25 * norm_lp_pow(g, u, 4.0)));
  }

  TEST_CASE("concavity diagnostics on an exact blow-up profile") {
    // v' = 2 v² ⇒ v(t) = v0 / (1 - 2 v0 t); then I' = v and I'/I^{1+δ} grows.
    const double v0 = 1.0, dt = 1e-3;
    DiagnosticsInput in;
    for (int k = 0; k < 400; ++k) {
      const double t = k * dt;
      in.times.push_back(t);
      in.v.push_back(v0 / (1 - 2 * v0 * t));
    }
    const auto d = diagnostics_from_ensemble(in, kFocus, 1.0);
    CHECK_FALSE(d.first_ratio_violation.has_value());
    for (std::size_t k = 1; k < d.I.size(); ++k) CHECK(d.I[k] >= d.I[k - 1]);

    // a decaying profile makes the ratio fall
    DiagnosticsInput down;
    for (int k = 0; k < 400; ++k) {
      down.times.push_back(k * dt);
      down.v.push_back(std::exp(-20.0 * k * dt));
    }
    CHECK(diagnostics_from_ensemble(down, kFocus, 1.0).first_ratio_violation.has_value());
  }
}
