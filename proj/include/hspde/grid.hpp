#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hspde {

struct CflError : std::runtime_error {
    CflError(double lambda_, const std::string& msg) : std::runtime_error(msg), lambda(lambda_) {}
    double lambda;
};

// (t, x) discretization. Times and space points are always recomputed from
// indices so no rounding accumulates across steps.
struct GridSpec {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;  // N; times t_0..t_N
    double dx = 0.0;
    std::size_t j_nodes = 0;  // J; nodes x_0..x_J

    double lambda() const { return dt / dx; }
    double time(std::size_t n) const { return t0 + static_cast<double>(n) * dt; }
    double x(std::size_t j) const { return static_cast<double>(j) * dx; }
    double horizon() const { return static_cast<double>(n_steps) * dt; }
};

// CFL gate: dt <= dx (lambda in (0,1]).
GridSpec validate_grid(const GridSpec& g);

}  // namespace hspde
