#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hspde/drivers.hpp"
#include "hspde/grid.hpp"
#include "hspde/kernels.hpp"
#include "hspde/volatility.hpp"

namespace hspde {

enum class BoundaryMode { ExtendedTriangle, ZeroAtXJ };

// dY = (dY/dx + alpha) dt + beta dM with alpha(t)(x) = p(x) a(t-) and
// beta(t)(x) = g(x) sigma(t-) (stationary kernels), solved from Y_0 = 0 plus
// the level mu.
struct HSPDEModel {
    double mu = 0.0;
    KernelSpec p = KernelSpec::zero();
    KernelSpec g = KernelSpec::zero();
    VolatilityModel a_model = VolatilityModel::constant(0.0);
    VolatilityModel sigma_model = VolatilityModel::constant(1.0);
    DriverSpec driver = DriverSpec::brownian(1.0);
    BoundaryMode boundary = BoundaryMode::ExtendedTriangle;
};

// Everything random a solve consumes, pre-sampled so FD and the oracles can
// run on common random numbers. dM holds martingale increments; drift_rate is
// the mean rate m routed into the drift coefficient when the driver is
// uncompensated.
struct SolveInputs {
    std::vector<double> dM;
    PathPair paths;
    double drift_rate = 0.0;
};

SolveInputs prepare_inputs(const HSPDEModel& model, const GridSpec& grid, std::uint64_t seed);

struct Field {
    GridSpec grid;
    std::size_t cols = 0;              // J + 1
    std::vector<double> values;        // row-major, (N+1) x cols; empty unless kept
    std::vector<std::uint8_t> pinned;  // per-cell: 1 if held at the spatial boundary value
    std::vector<double> boundary;      // y_0^n, n = 0..N
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;

    double at(std::size_t n, std::size_t j) const { return values[n * cols + j]; }
};

// Coefficient combination shared by the FD solver and the numerical
// integration oracle; keeping one arithmetic path is what makes the two
// boundaries bit-identical at lambda = 1.
inline double alpha_coeff(double pu, double gu, double a, double sigma, double m) {
    return pu * a + m * (gu * sigma);
}
inline double beta_coeff(double gu, double sigma) { return gu * sigma; }
inline double accumulate_step(double acc, double alpha, double beta, double dt, double dM) {
    return acc + alpha * dt + beta * dM;
}

// One explicit update: out[j] = lambda row[j+1] + (1-lambda) row[j]
//                             + alpha[j] dt + beta[j] dM.
// out must have row.size() - 1 entries.
void fd_step(std::span<const double> row, std::span<const double> alpha,
             std::span<const double> beta, double dM, double lambda, double dt,
             std::span<double> out);

Field solve(const HSPDEModel& model, const GridSpec& grid, std::uint64_t seed,
            bool keep_field = true);
Field solve_with(const HSPDEModel& model, const GridSpec& grid, const SolveInputs& inputs,
                 std::uint64_t seed = 0, bool keep_field = true);

// T^m f at lattice index i via the binomial representation
// T^m f(x) = sum_k C(m,k) lambda^k (1-lambda)^{m-k} f(x + k dx).
double apply_T_power(std::span<const double> f, std::size_t m, double lambda, std::size_t i);
// Same operator by m-fold application of T = I + dt (S(dx) - I)/dx.
double apply_T_iterated(std::span<const double> f, std::size_t m, double lambda, std::size_t i);

// y_j^n via the closed-form representation
// y_j^n = T^n y0_j + sum_i T^{n-1-i} alpha_j^i dt + sum_i T^{n-1-i} beta_j^i dM^i.
double representation_sum(const HSPDEModel& model, const GridSpec& grid, const SolveInputs& inputs,
                          std::size_t n, std::size_t j);

void write_field_csv(const std::filesystem::path& path, const Field& f);
void write_field_bin(const std::filesystem::path& path, const Field& f);
Field read_field_bin(const std::filesystem::path& path);

}  // namespace hspde
