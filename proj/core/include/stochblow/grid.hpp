#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stochblow {

/// Nodal values at the interior nodes of an IntervalGrid. Boundary values are
/// implicitly zero (homogeneous Dirichlet).
using Field = std::vector<double>;

/// Uniform grid on (0, L) with n interior nodes and spacing h = L / (n + 1).
class IntervalGrid {
 public:
  IntervalGrid(double length, std::size_t interior_nodes);

  double length() const { return length_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  /// x-coordinate of interior node i (0-based), i.e. (i + 1) h.
  double node(std::size_t i) const { return static_cast<double>(i + 1) * h_; }

  /// Samples f at every interior node.
  template <class F>
  Field sample(F&& f) const {
    Field out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = f(node(i));
    return out;
  }

 private:
  double length_;
  std::size_t n_;
  double h_;
};

/// Symmetric tridiagonal matrix stored by diagonals.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // size n - 1

  std::size_t size() const { return diag.size(); }
  void apply(std::span<const double> x, std::span<double> y) const;
  Field apply(std::span<const double> x) const;
  std::vector<std::vector<double>> dense() const;
};

/// (1/h²) tridiag(1, -2, 1): the Dirichlet Laplacian.
SymTridiagonal build_laplacian(const IntervalGrid& grid);

enum class EigenvalueFlavor { discrete, continuum };

/// Smallest eigenvalue of -Δ. Discrete: (2/h²)(1 - cos(πh/L)); continuum: π²/L².
double first_eigenvalue(const IntervalGrid& grid,
                        EigenvalueFlavor flavor = EigenvalueFlavor::discrete);

/// Discrete first eigenvector sin(πx/L) sampled at the nodes, scaled to unit L² norm.
Field first_eigenvector(const IntervalGrid& grid);

// Rectangle-rule norms with uniform weight h. The `_sq` / `_pow` variants
// return the quantity before taking the root, which is what the energy
// identities are written in.
double inner(const IntervalGrid& grid, std::span<const double> f, std::span<const double> g);
double norm_l2_sq(const IntervalGrid& grid, std::span<const double> f);
double norm_l2(const IntervalGrid& grid, std::span<const double> f);
double seminorm_h1_sq(const IntervalGrid& grid, std::span<const double> f);
double seminorm_h1(const IntervalGrid& grid, std::span<const double> f);
double norm_lp_pow(const IntervalGrid& grid, std::span<const double> f, double p);
double norm_lp(const IntervalGrid& grid, std::span<const double> f, double p);
double norm_sup(std::span<const double> f);

/// Solver for (I - c·Lap) x = b with c ≥ 0, factored once (Thomas algorithm).
class ImplicitHeatSolver {
 public:
  ImplicitHeatSolver(const IntervalGrid& grid, double coefficient);

  double coefficient() const { return coefficient_; }
  void solve(std::span<const double> rhs, std::span<double> out) const;

 private:
  double coefficient_;
  double off_;                    // constant off-diagonal -c/h²
  std::vector<double> inv_pivot_;  // 1 / modified diagonal
  std::vector<double> upper_;      // modified super-diagonal
};

}  // namespace stochblow
