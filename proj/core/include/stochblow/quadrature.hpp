#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace stochblow {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

/// Adaptive 7/15-point Gauss-Kronrod on [a, b] with global error control:
/// subdivides the worst interval until the summed estimate is below
/// max(abs_tol, rel_tol·|I|). Throws std::domain_error on non-finite integrand values.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-10, double abs_tol = 0.0,
                                    int max_intervals = 2000);

/// Composite Gauss-Kronrod-15 nodes and weights on [a, b] split into `panels` equal panels.
std::vector<std::pair<double, double>> kronrod_rule(double a, double b, int panels);

}  // namespace stochblow
