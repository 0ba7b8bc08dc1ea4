#pragma once

#include <cstdint>
#include <vector>

#include "hspde/scheme.hpp"

namespace hspde {

// Independent references used to validate the finite difference solver.

// Mild-solution value at (t_n, x) by direct numerical integration over the
// same increments and volatility paths a solve consumes:
//   mu + sum_i p(t_n - t_{i+1} + x) a_i dt + sum_i g(t_n - t_{i+1} + x) sigma_i dM^i.
// At lambda = 1 and x = 0 this reproduces the FD boundary bit-for-bit.
double numint_value(const HSPDEModel& model, const GridSpec& grid, const SolveInputs& inputs,
                    std::size_t n, double x);

std::vector<double> numint_boundary(const HSPDEModel& model, const GridSpec& grid,
                                    const SolveInputs& inputs);

// Exact Ornstein-Uhlenbeck trajectory X_{n+1} = e^{-alpha dt} X_n + sigma eta_n,
// eta_n ~ N(0, (1 - e^{-2 alpha dt})/(2 alpha)), X_0 = 0, driven by the given
// standard normals (the same source the Brownian increments are mapped from).
std::vector<double> exact_ou_path(double alpha, double sigma_const, const GridSpec& grid,
                                  const std::vector<double>& normals);

struct Moments {
    double mean;
    double second;
};

// Closed-form first and second moment of the boundary value X(t) for models
// with deterministic constant a and constant or stationary OU volatility.
Moments moments_formula(const HSPDEModel& model, const GridSpec& grid, double t);

// Kernel-norm part ||p 1_tail||_1^2 + ||g 1_tail||_2^2 of the truncation
// error, at history horizon (t - r).
double truncation_error(const HSPDEModel& model, double t, double r);

// Upper bound for the constant C multiplying the kernel-norm part.
double truncation_constant(const HSPDEModel& model);

struct ErrorBudget {
    double c1, c2, c3, c4;
    double mod_a, mod_sigma;     // modulus terms M_a(dt), M_sigma(dt)
    double lipschitz;            // L in the squared sense
    double sup_bound_k;          // K
    double qvar;                 // E[<M>(t_n)]
    double total;                // C1 (dx-dt) + C2 dt^2 + C3 M_a + C4 M_sigma
};

ErrorBudget error_budget(const HSPDEModel& model, const GridSpec& grid, std::size_t n);

}  // namespace hspde
