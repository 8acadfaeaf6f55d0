#include "stochblow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stochblow {

namespace {

void require_size(const IntervalGrid& grid, std::span<const double> f) {
  if (f.size() != grid.size())
    throw std::invalid_argument("field has " + std::to_string(f.size()) +
                                " values, grid has " + std::to_string(grid.size()) + " nodes");
}

}  // namespace

IntervalGrid::IntervalGrid(double length, std::size_t interior_nodes)
    : length_(length), n_(interior_nodes), h_(length / static_cast<double>(interior_nodes + 1)) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("grid length must be positive and finite");
  if (interior_nodes < 2) throw std::invalid_argument("grid needs at least 2 interior nodes");
}

void SymTridiagonal::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = diag[i] * x[i];
    if (i > 0) acc += off[i - 1] * x[i - 1];
    if (i + 1 < n) acc += off[i] * x[i + 1];
    y[i] = acc;
  }
}

Field SymTridiagonal::apply(std::span<const double> x) const {
  Field y(size());
  apply(x, y);
  return y;
}

std::vector<std::vector<double>> SymTridiagonal::dense() const {
  const std::size_t n = size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    m[i][i] = diag[i];
    if (i + 1 < n) m[i][i + 1] = m[i + 1][i] = off[i];
  }
  return m;
}

SymTridiagonal build_laplacian(const IntervalGrid& grid) {
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  SymTridiagonal lap;
  lap.diag.assign(grid.size(), -2.0 * inv_h2);
  lap.off.assign(grid.size() - 1, inv_h2);
  return lap;
}

double first_eigenvalue(const IntervalGrid& grid, EigenvalueFlavor flavor) {
  const double pi = std::numbers::pi;
  const double L = grid.length();
  if (flavor == EigenvalueFlavor::continuum) return pi * pi / (L * L);
  const double h = grid.spacing();
  // 4/h² sin²(πh/2L) == 2/h²(1 - cos(πh/L)) without the cancellation.
  const double s = std::sin(pi * h / (2.0 * L));
  return 4.0 * s * s / (h * h);
}

Field first_eigenvector(const IntervalGrid& grid) {
  const double pi = std::numbers::pi;
  Field v = grid.sample([&](double x) { return std::sin(pi * x / grid.length()); });
  const double scale = 1.0 / norm_l2(grid, v);
  for (double& x : v) x *= scale;
  return v;
}

double inner(const IntervalGrid& grid, std::span<const double> f, std::span<const double> g) {
  require_size(grid, f);
  require_size(grid, g);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g[i];
  return grid.spacing() * acc;
}

double norm_l2_sq(const IntervalGrid& grid, std::span<const double> f) { return inner(grid, f, f); }

double norm_l2(const IntervalGrid& grid, std::span<const double> f) {
  return std::sqrt(norm_l2_sq(grid, f));
}

double seminorm_h1_sq(const IntervalGrid& grid, std::span<const double> f) {
  require_size(grid, f);
  const std::size_t n = f.size();
  double acc = f[0] * f[0] + f[n - 1] * f[n - 1];  // gaps to the ghost zeros
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = f[i + 1] - f[i];
    acc += d * d;
  }
  return acc / grid.spacing();
}

double seminorm_h1(const IntervalGrid& grid, std::span<const double> f) {
  return std::sqrt(seminorm_h1_sq(grid, f));
}

double norm_lp_pow(const IntervalGrid& grid, std::span<const double> f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("norm_lp requires finite p >= 1");
  require_size(grid, f);
  double acc = 0.0;
  if (p == 2.0) {
    for (double x : f) acc += x * x;
  } else {
    for (double x : f) acc += std::pow(std::abs(x), p);
  }
  return grid.spacing() * acc;
}

double norm_lp(const IntervalGrid& grid, std::span<const double> f, double p) {
  const double s = norm_lp_pow(grid, f, p);
  return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

double norm_sup(std::span<const double> f) {
  double m = 0.0;
  for (double x : f) {
    if (!std::isfinite(x)) return x;
    m = std::max(m, std::abs(x));
  }
  return m;
}

ImplicitHeatSolver::ImplicitHeatSolver(const IntervalGrid& grid, double coefficient)
    : coefficient_(coefficient) {
  if (!(coefficient >= 0.0)) throw std::invalid_argument("implicit coefficient must be >= 0");
  const std::size_t n = grid.size();
  const double r = coefficient / (grid.spacing() * grid.spacing());
  const double d = 1.0 + 2.0 * r;
  off_ = -r;
  inv_pivot_.resize(n);
  upper_.resize(n);
  double pivot = d;
  inv_pivot_[0] = 1.0 / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    upper_[i - 1] = off_ * inv_pivot_[i - 1];
    pivot = d - off_ * upper_[i - 1];
    inv_pivot_[i] = 1.0 / pivot;
  }
}

void ImplicitHeatSolver::solve(std::span<const double> rhs, std::span<double> out) const {
  const std::size_t n = inv_pivot_.size();
  out[0] = rhs[0] * inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) out[i] = (rhs[i] - off_ * out[i - 1]) * inv_pivot_[i];
  for (std::size_t i = n - 1; i-- > 0;) out[i] -= upper_[i] * out[i + 1];
}

}  // namespace stochblow
