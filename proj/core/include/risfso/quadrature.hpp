#pragma once

#include <functional>

namespace risfso::quadrature {

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod 15(7) on a finite interval.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-10,
                     int max_subdiv = 4000);

}  // namespace risfso::quadrature
