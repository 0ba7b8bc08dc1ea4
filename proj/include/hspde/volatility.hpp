#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "hspde/drivers.hpp"
#include "hspde/grid.hpp"

namespace hspde {

// Stochastic volatility sigma (or drift process a) sampled non-anticipatively
// on the time grid. The OU-subordinator variant is sigma^2(t) = Z(t) with
// Z(t) = int_{-inf}^t e^{-lambda(t-s)} dU(s), U a subordinator.
class VolatilityModel {
public:
    enum class Kind { Constant, Tabulated, OUSubordinator };

    static VolatilityModel constant(double value);
    static VolatilityModel tabulated(std::vector<double> values);
    static VolatilityModel ou_subordinator(double lambda, DriverSpec subordinator,
                                           double burn_in_tol = 1e-6);

    Kind kind() const { return kind_; }
    double value() const { return value_; }
    const std::vector<double>& table() const { return table_; }
    double mean_reversion() const { return lambda_; }
    const DriverSpec& subordinator() const { return subordinator_; }
    double burn_in_tol() const { return burn_in_tol_; }
    double z0_override() const { return z0_override_; }

    // Replaces the burn-in initialization with a fixed Z(t_0).
    VolatilityModel with_initial_z(double z0) const;

private:
    VolatilityModel() : subordinator_(DriverSpec::brownian(1.0)) {}

    Kind kind_ = Kind::Constant;
    double value_ = 0.0;
    std::vector<double> table_;
    double lambda_ = 0.0;
    DriverSpec subordinator_;
    double burn_in_tol_ = 1e-6;
    double z0_override_ = -1.0;  // < 0 means burn-in
};

struct PathPair {
    std::vector<double> a;      // a(t_n-), n = 0..N
    std::vector<double> sigma;  // sigma(t_n-), n = 0..N
    std::uint64_t seed = 0;
};

// Z path on t_0..t_N via the left-point recursion
// Z_{n+1} = e^{-lambda dt} (Z_n + dU_n), initialized by burn-in from the
// stationary mean. Raw (uncompensated) subordinator increments.
std::vector<double> simulate_variance_path(const VolatilityModel& v, double dt, std::size_t n_steps,
                                           std::uint64_t root_seed,
                                           std::string_view stream_id = "subordinator");

// sigma and a sampled on the grid; sigma uses stream "subordinator", a uses
// "subordinator_a" when stochastic.
PathPair simulate_paths(const VolatilityModel& sigma_model, const VolatilityModel& a_model,
                        const GridSpec& grid, std::uint64_t root_seed);

// (E[Z], Var[Z]) in the stationary regime: (m_U/lambda, C_U/(2 lambda)).
std::pair<double, double> stationary_moments(const VolatilityModel& v);

// sup_{|s-r|<dt} E[|sigma(s)-sigma(r)|^2] <= (2C/lambda)(1 - e^{-lambda dt/2}),
// C = E[U(1)^2].
double sigma_modulus_bound(const VolatilityModel& v, double dt);

// t,a,sigma rows with 17 significant digits.
void write_paths_csv(const std::filesystem::path& path, const GridSpec& grid, const PathPair& p);
PathPair read_paths_csv(const std::filesystem::path& path);

}  // namespace hspde
