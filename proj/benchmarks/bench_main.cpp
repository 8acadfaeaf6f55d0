#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "stochblow/ensemble.hpp"
#include "stochblow/oracles.hpp"

using namespace stochblow;
using std::numbers::pi;

namespace {

const LevyMeasure kAtom{FiniteAtoms{{{1.0, 2.0}}}};

SpdeProblem additive(std::size_t n) {
  return SpdeProblem{IntervalGrid(1.0, n), ModelParams{1.0, 1.0, 3.0},
                     AdditiveNoise::decaying_sine(1.0, 0.5, 1.0, 1, 1.0, 50.0), kAtom};
}

Field sine(const IntervalGrid& g, double c) {
  return g.sample([&](double x) { return c * std::sin(pi * x); });
}

void BM_Step(benchmark::State& state) {
  const auto p = additive(static_cast<std::size_t>(state.range(0)));
  SemiImplicitStepper stepper(p);
  Field u = sine(p.grid, 1.0), out(u.size());
  for (auto _ : state) {
    stepper.step(u, 0.0, 1e-4, 1e-2, {}, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Step)->Arg(49)->Arg(199)->Arg(799);

void BM_ImplicitSolve(benchmark::State& state) {
  const IntervalGrid g(1.0, static_cast<std::size_t>(state.range(0)));
  ImplicitHeatSolver solver(g, 1e-4);
  Field b = sine(g, 1.0), x(b.size());
  for (auto _ : state) {
    solver.solve(b, x);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_ImplicitSolve)->Arg(99)->Arg(999);

void BM_SimulatePath(benchmark::State& state) {
  const auto p = additive(49);
  const auto u0 = sine(p.grid, 2.0);
  PathOptions o;
  o.horizon = 0.1;
  o.record_stride = 10;
  const auto mode = state.range(0) ? JumpMode::jump_adapted : JumpMode::fixed_grid;
  std::uint64_t path = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path(p, u0, StepScheme{1e-4, mode}, o, 1, path++));
}
BENCHMARK(BM_SimulatePath)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Ensemble(benchmark::State& state) {
  const auto p = additive(49);
  const auto u0 = sine(p.grid, 2.0);
  EnsembleConfig c;
  c.paths = 64;
  c.scheme = StepScheme{1e-4, JumpMode::fixed_grid};
  c.horizon = 0.05;
  c.record_stride = 10;
  c.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(c, p, u0));
}
BENCHMARK(BM_Ensemble)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ThetaSearch(benchmark::State& state) {
  std::vector<double> u(32), eta(32);
  for (std::size_t i = 0; i < 32; ++i) {
    u[i] = std::sin(0.3 * i);
    eta[i] = 0.2 * std::cos(0.7 * i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(taylor_remainder_theta(u, eta, 3.5, 1.0 / 33));
}
BENCHMARK(BM_ThetaSearch);

}  // namespace

BENCHMARK_MAIN();
