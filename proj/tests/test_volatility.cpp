#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "hspde/volatility.hpp"

using hspde::DriverSpec;
using hspde::GridSpec;
using hspde::VolatilityModel;

namespace {

DriverSpec ig15() { return DriverSpec::inverse_gaussian(15.0, 1.0, /*compensated=*/false); }

}  // namespace

TEST_CASE("construction rules") {
    CHECK_THROWS_AS(VolatilityModel::ou_subordinator(0.0, ig15()), std::invalid_argument);
    CHECK_THROWS_AS(VolatilityModel::ou_subordinator(0.01, DriverSpec::brownian(1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(VolatilityModel::ou_subordinator(0.01, ig15(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(VolatilityModel::ou_subordinator(0.01, ig15(), 1.5), std::invalid_argument);
    CHECK_THROWS_AS(VolatilityModel::tabulated({}), std::invalid_argument);
    CHECK_THROWS_AS(VolatilityModel::constant(1.0).with_initial_z(2.0), std::invalid_argument);
}

TEST_CASE("deterministic paths") {
    GridSpec grid{0.0, 0.1, 10, 0.1, 4};
    auto p = hspde::simulate_paths(VolatilityModel::constant(1.0), VolatilityModel::constant(0.0),
                                   grid, 1);
    CHECK(p.sigma.size() == 11);
    CHECK(p.a.size() == 11);
    for (double s : p.sigma) CHECK(s == 1.0);
    for (double a : p.a) CHECK(a == 0.0);

    auto tab = VolatilityModel::tabulated({1.0, 2.0, 3.0});
    GridSpec small{0.0, 0.1, 2, 0.1, 1};
    auto pt = hspde::simulate_paths(tab, VolatilityModel::constant(0.0), small, 1);
    CHECK(pt.sigma == std::vector<double>{1.0, 2.0, 3.0});
    CHECK_THROWS_AS(hspde::simulate_paths(tab, VolatilityModel::constant(0.0), grid, 1),
                    std::invalid_argument);
}

TEST_CASE("stationary moments of the IG-driven OU variance") {
    auto v = VolatilityModel::ou_subordinator(0.01, ig15());
    auto [mean, var] = hspde::stationary_moments(v);
    CHECK(mean == doctest::Approx(1500.0));
    CHECK(var == doctest::Approx(750.0));
    CHECK_THROWS_AS(hspde::stationary_moments(VolatilityModel::constant(1.0)),
                    std::invalid_argument);
    // Mean vanishes as the reversion rate grows.
    auto fast = VolatilityModel::ou_subordinator(1e6, ig15());
    CHECK(hspde::stationary_moments(fast).first == doctest::Approx(15.0 / 1e6));
}

TEST_CASE("modulus of continuity bound") {
    auto v = VolatilityModel::ou_subordinator(0.01, ig15());
    CHECK(hspde::sigma_modulus_bound(v, 0.0) == 0.0);
    // C = 15 + 225 = 240; (2*240/0.01)(1 - e^{-0.01*0.01/2}) at dt = 0.01.
    double bound = hspde::sigma_modulus_bound(v, 0.01);
    CHECK(bound == doctest::Approx(48000.0 * -std::expm1(-5e-5)).epsilon(1e-14));
    CHECK(bound == doctest::Approx(2.3999).epsilon(1e-4));
    double prev = 0.0;
    for (double dt : {0.001, 0.01, 0.1, 1.0}) {
        double b = hspde::sigma_modulus_bound(v, dt);
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("zero subordinator decays deterministically") {
    auto sub = DriverSpec::compound_poisson(0.0, 1.0, 4.0, /*compensated=*/false);
    auto v = VolatilityModel::ou_subordinator(0.5, sub).with_initial_z(8.0);
    auto z = hspde::simulate_variance_path(v, 0.1, 20, 77);
    for (std::size_t n = 0; n <= 20; ++n)
        CHECK(z[n] == doctest::Approx(8.0 * std::exp(-0.5 * 0.1 * static_cast<double>(n)))
                          .epsilon(1e-12));
}

TEST_CASE("variance paths are nonnegative and reproducible") {
    auto v = VolatilityModel::ou_subordinator(1.0, DriverSpec::inverse_gaussian(2.0, 1.0, false));
    auto z1 = hspde::simulate_variance_path(v, 0.05, 500, 123);
    auto z2 = hspde::simulate_variance_path(v, 0.05, 500, 123);
    CHECK(z1 == z2);
    for (double x : z1) CHECK(x >= 0.0);
    auto z3 = hspde::simulate_variance_path(v, 0.05, 500, 124);
    CHECK(z1 != z3);
}

TEST_CASE("extending the grid preserves the sampled prefix") {
    // Adaptedness: values up to t_n do not depend on later increments.
    auto v = VolatilityModel::ou_subordinator(1.0, DriverSpec::inverse_gaussian(2.0, 1.0, false));
    auto z_short = hspde::simulate_variance_path(v, 0.05, 100, 5);
    auto z_long = hspde::simulate_variance_path(v, 0.05, 160, 5);
    for (std::size_t n = 0; n <= 100; ++n) CHECK(z_short[n] == z_long[n]);
}

TEST_CASE("long-run mean and variance match the stationary law") {
    auto v = VolatilityModel::ou_subordinator(1.0, DriverSpec::inverse_gaussian(2.0, 1.0, false));
    auto [mz, vz] = hspde::stationary_moments(v);
    const std::size_t paths = 800;
    std::vector<double> last(paths);
    for (std::size_t i = 0; i < paths; ++i)
        last[i] = hspde::simulate_variance_path(v, 0.1, 60, 9000 + i).back();
    double mean = std::accumulate(last.begin(), last.end(), 0.0) / paths;
    double var = 0.0, m4 = 0.0;
    for (double x : last) {
        var += (x - mean) * (x - mean);
        m4 += (x - mean) * (x - mean) * (x - mean) * (x - mean);
    }
    var /= paths;
    m4 /= paths;
    double se_mean = std::sqrt(var / paths);
    double se_var = std::sqrt(std::max(m4 - var * var, 0.0) / paths);
    CHECK(std::abs(mean - mz) <= 4.0 * se_mean);
    CHECK(std::abs(var - vz) <= 4.0 * se_var);
}

TEST_CASE("empirical modulus stays below the bound") {
    auto v = VolatilityModel::ou_subordinator(0.5, DriverSpec::inverse_gaussian(2.0, 1.0, false));
    const double dt = 0.05;
    const std::size_t steps = 40, paths = 500;
    double bound = hspde::sigma_modulus_bound(v, dt);
    std::vector<double> mean_sq(steps, 0.0);
    for (std::size_t i = 0; i < paths; ++i) {
        auto z = hspde::simulate_variance_path(v, dt, steps, 31000 + i);
        for (std::size_t n = 0; n < steps; ++n) {
            double d = std::sqrt(z[n + 1]) - std::sqrt(z[n]);
            mean_sq[n] += d * d / paths;
        }
    }
    for (double m : mean_sq) CHECK(m <= bound);
}

TEST_CASE("path pair round trips through CSV") {
    GridSpec grid{0.0, 0.05, 30, 0.05, 2};
    auto v = VolatilityModel::ou_subordinator(1.0, DriverSpec::inverse_gaussian(2.0, 1.0, false));
    auto p = hspde::simulate_paths(v, VolatilityModel::constant(0.5), grid, 88);
    auto dir = std::filesystem::temp_directory_path() / "hspde_test_paths";
    std::filesystem::create_directories(dir);
    hspde::write_paths_csv(dir / "p.csv", grid, p);
    auto r = hspde::read_paths_csv(dir / "p.csv");
    CHECK(r.seed == 88);
    CHECK(r.a == p.a);
    CHECK(r.sigma == p.sigma);
    std::filesystem::remove_all(dir);
}
