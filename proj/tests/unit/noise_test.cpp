#include <cmath>
#include <numbers>

#include "doctest.h"
#include "stochblow/noise.hpp"

using namespace stochblow;
using std::numbers::pi;

TEST_SUITE("noise_models") {
  const LevyMeasure atom{FiniteAtoms{{{1.0, 2.0}}}};
  const IntervalGrid grid(1.0, 399);
  const double h2 = 1.0 / (400.0 * 400.0);

  TEST_CASE("gradient energy of absent noise is zero") {
    CHECK(noise_grad_energy(AdditiveNoise::none(), grid, atom).value() == 0.0);
    CHECK(noise_flat_rate(AdditiveNoise::none(), grid, atom, 0.3) == 0.0);
  }

  TEST_CASE("gradient energy of decaying sine coefficients") {
    const auto sigma = AdditiveNoise::decaying_sine(1.0, 0.0, 1.0, 1, 1.0, 50.0);
    const auto e = noise_grad_energy(sigma, grid, LevyMeasure());
    REQUIRE(e.has_value());
    CHECK(std::abs(*e - pi * pi / 4) <= 5.0 * h2);
    CHECK(pi * pi / 4 == doctest::Approx(2.4674).epsilon(1e-4));

    const auto eta = AdditiveNoise::decaying_sine(0.0, 1.0, 1.0, 1, 1.0, 50.0);
    const auto ej = noise_grad_energy(eta, grid, atom);
    REQUIRE(ej.has_value());
    CHECK(std::abs(*ej - pi * pi / 2) <= 10.0 * h2);
  }

  TEST_CASE("flat energy over a finite window") {
    const auto s = AdditiveNoise::decaying_sine(2.0, 0.0, 1.0, 1, 1.0, 50.0);
    const IntervalGrid g(1.0, 49);
    // ‖σ(t)‖² = 4 e^{-2t}·(1/2) exactly on the grid (Σ h sin² = 1/2)
    CHECK(noise_flat_rate(s, g, LevyMeasure(), 0.7) == doctest::Approx(2.0 * std::exp(-1.4)).epsilon(1e-12));
    const auto e = noise_flat_energy(s, g, LevyMeasure(), 1.0);
    REQUIRE(e.has_value());
    CHECK(*e == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-7));
  }

  TEST_CASE("coefficients vanish after the decay horizon") {
    const auto s = AdditiveNoise::decaying_sine(1.0, 1.0, 0.0, 1, 1.0, 2.0);
    CHECK(s.sigma_at(0.5, 1.0) == doctest::Approx(1.0));
    CHECK(s.sigma_at(0.5, 2.5) == 0.0);
    CHECK(s.eta_at(0.5, 2.5, 1.0) == 0.0);
  }

  TEST_CASE("kappa") {
    const MultiplicativeNoise zero(0.0, nullptr, LevyMeasure());
    CHECK(kappa(zero, LevyMeasure()) == 0.0);
    const MultiplicativeNoise both(1.0, [](double z) { return z; }, atom);
    CHECK(kappa(both, atom) == doctest::Approx(1.5));
    const MultiplicativeNoise brown(2.0, nullptr, LevyMeasure());
    CHECK(kappa(brown, LevyMeasure()) == doctest::Approx(2.0));
  }

  TEST_CASE("kappa window") {
    CHECK(check_kappa_window(0.0, 0.3, pi * pi).ok);
    const auto w = check_kappa_window(pi * pi / 2, 1.0, pi * pi);
    CHECK(w.ok);
    CHECK(w.margin == doctest::Approx(pi * pi / 2));
    CHECK_FALSE(check_kappa_window(10.0, 1.0, pi * pi).ok);
  }

  TEST_CASE("negative multiplicative jump coefficient is rejected") {
    CHECK_THROWS(MultiplicativeNoise(0.0, [](double z) { return -z; }, atom));
    const LevyMeasure stable{TruncatedStable{1.0, 0.5, 0.1, 1.0}};
    CHECK_THROWS(MultiplicativeNoise(0.0, [](double z) { return z; }, stable));
    CHECK_NOTHROW(MultiplicativeNoise(0.0, [](double z) { return std::abs(z); }, stable));
  }

  TEST_CASE("scaling noise scales the energies quadratically") {
    const auto s = AdditiveNoise::decaying_sine(1.0, 0.5, 1.0, 1, 1.0, 50.0);
    const auto scaled = scale_noise(NoiseModel{s}, 3.0, atom);
    const auto& a = std::get<AdditiveNoise>(scaled);
    CHECK(noise_grad_rate(a, grid, atom, 0.2) == doctest::Approx(9.0 * noise_grad_rate(s, grid, atom, 0.2)));
    const MultiplicativeNoise mul(1.0, [](double z) { return z; }, atom);
    const auto ms = std::get<MultiplicativeNoise>(scale_noise(NoiseModel{mul}, 2.0, atom));
    CHECK(kappa(ms, atom) == doctest::Approx(4.0 * kappa(mul, atom)));
  }
}
