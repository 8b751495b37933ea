#pragma once

#include <functional>

namespace ouedge {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // Kronrod-Gauss difference, summed over intervals
  int intervals = 0;
};

// Globally adaptive Gauss-Kronrod (G7/K15) on a finite interval [a, b].
// Bisects the interval with the largest error estimate until the total error
// is below max(abs_tol, rel_tol * |value|) or max_intervals is reached.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-13, double rel_tol = 1e-12,
                           int max_intervals = 2000);

}  // namespace ouedge
