#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "stochblow/levy.hpp"
#include "stochblow/quadrature.hpp"

using namespace stochblow;

namespace {

const LevyMeasure kAtom{FiniteAtoms{{{1.0, 2.0}}}};
const LevyMeasure kStable{TruncatedStable{1.0, 0.5, 0.1, 1.0}};

struct Moments {
  double n = 0, mean = 0, m2 = 0;
  void add(double x) {
    n += 1;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double var() const { return m2 / (n - 1); }
  double se() const { return std::sqrt(var() / n); }
};

}  // namespace

TEST_SUITE("levy_noise") {
  TEST_CASE("total rate") {
    CHECK(kAtom.total_rate() == 2.0);
    CHECK(total_rate(kStable) == doctest::Approx(2.0 * (std::pow(0.1, -0.5) - 1.0) / 0.5).epsilon(1e-10));
    CHECK(total_rate(kStable) == doctest::Approx(8.6491).epsilon(1e-4));
    CHECK(LevyMeasure(FiniteAtoms{}).total_rate() == 0.0);
    CHECK(LevyMeasure().is_zero());
  }

  TEST_CASE("integrals against the measure") {
    CHECK(kStable.integrate([](double) { return 1.0; }) == doctest::Approx(kStable.total_rate()));
    const LevyMeasure a{FiniteAtoms{{{0.5, 4.0}}}};
    CHECK(integral_against_levy(a, [](double z) { return z * z; }) == doctest::Approx(1.0));
    const double closed = (4.0 / 3.0) * (1.0 - std::pow(0.1, 1.5));
    CHECK(kStable.integrate([](double z) { return z * z; }) == doctest::Approx(closed).epsilon(1e-10));
    CHECK(closed == doctest::Approx(1.2912).epsilon(1e-4));
    // independent midpoint sum over both half-lines
    double mid = 0.0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
      const double z = 0.1 + (i + 0.5) * 0.9 / N;
      mid += 2.0 * z * z * std::pow(z, -1.5) * 0.9 / N;
    }
    CHECK(mid == doctest::Approx(closed).epsilon(1e-8));
  }

  TEST_CASE("fixed rule reproduces the adaptive integral") {
    auto g = [](double z) { return std::exp(-z) * z * z + std::cos(3 * z); };
    double s = 0.0;
    for (auto [z, w] : kStable.rule()) s += w * g(z);
    CHECK(s == doctest::Approx(kStable.integrate(g)).epsilon(1e-9));
  }

  TEST_CASE("Levy moment is finite") {
    for (const auto* m : {&kAtom, &kStable}) {
      const double v = m->levy_moment();
      CHECK(std::isfinite(v));
      CHECK(v > 0.0);
    }
    CHECK(kStable.levy_moment() == doctest::Approx(kStable.integrate([](double z) { return std::min(z * z, 1.0); })));
  }

  TEST_CASE("sampling respects support, order and horizon") {
    RngStream rng(3, 0, 1);
    const auto ev = kStable.sample_jumps(5.0, rng);
    CHECK(std::is_sorted(ev.begin(), ev.end(), [](auto& a, auto& b) { return a.time < b.time; }));
    for (const auto& e : ev) {
      CHECK(e.time > 0.0);
      CHECK(e.time <= 5.0);
      CHECK(std::abs(e.mark) >= 0.1);
      CHECK(std::abs(e.mark) <= 1.0);
    }
    RngStream r0(3, 0, 1);
    CHECK(LevyMeasure().sample_jumps(10.0, r0).empty());
  }

  TEST_CASE("Poisson count law") {
    Moments count;
    for (std::uint64_t s = 0; s < 10000; ++s) {
      RngStream rng(11, s, 1);
      count.add(static_cast<double>(sample_jumps(kAtom, 10.0, rng).size()));
    }
    CHECK(std::abs(count.mean - 20.0) <= 4.0 * count.se());
    // variance of a Poisson(20) sample variance: (20 + 2·20²)/n
    CHECK(std::abs(count.var() - 20.0) <= 4.0 * std::sqrt((20.0 + 2 * 400.0) / count.n));
  }

  TEST_CASE("compensated sums have mean zero") {
    auto g = [](double z) { return std::sin(5 * z) + 0.3; };
    const double comp = kStable.integrate(g);
    const double t = 2.0;
    Moments m;
    for (std::uint64_t s = 0; s < 10000; ++s) {
      RngStream rng(21, s, 1);
      double sum = 0.0;
      for (const auto& e : kStable.sample_jumps(t, rng)) sum += g(e.mark);
      m.add(sum - t * comp);
    }
    CHECK(std::abs(m.mean) <= 4.0 * m.se());
  }

  TEST_CASE("rate of events per unit time approaches the total rate") {
    double events = 0.0;
    const double T = 1.0;
    const int streams = 20000;
    for (int s = 0; s < streams; ++s) {
      RngStream rng(4, s, 1);
      events += static_cast<double>(kStable.sample_jumps(T, rng).size());
    }
    const double rate = events / (T * streams);
    CHECK(std::abs(rate - kStable.total_rate()) <= 4.0 * std::sqrt(kStable.total_rate() / (T * streams)));
  }

  TEST_CASE("streams are reproducible and distinct") {
    RngStream a(1, 2, 0), b(1, 2, 0), c(1, 3, 0), d(1, 2, 1);
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
    CHECK(x != d.normal());
    RngStream u(8, 8);
    for (int i = 0; i < 1000; ++i) {
      const double v = u.uniform();
      CHECK((v > 0.0 && v < 1.0));
    }
  }

  TEST_CASE("adaptive quadrature") {
    const auto r = integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    CHECK_THROWS(integrate_adaptive([](double x) { return 1.0 / (x - 0.5); }, 0.0, 1.0));
  }
}
