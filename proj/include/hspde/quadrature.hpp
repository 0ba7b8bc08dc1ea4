#pragma once

#include <functional>

namespace hspde {

// Adaptive Gauss-Kronrod 15(7) integration on [a,b]. The interval is bisected
// until the local Kronrod-Gauss error estimate meets the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-14, int max_depth = 60);

// Integral over [r, infinity) via the substitution u = r + v/(1-v).
double integrate_tail(const std::function<double(double)>& f, double r,
                      double rel_tol = 1e-10, double abs_tol = 1e-14);

}  // namespace hspde
