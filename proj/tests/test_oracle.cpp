#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "hspde/oracle.hpp"
#include "hspde/quadrature.hpp"

using hspde::DriverSpec;
using hspde::GridSpec;
using hspde::HSPDEModel;
using hspde::KernelSpec;
using hspde::VolatilityModel;

TEST_CASE("re-integration base cases") {
    HSPDEModel model;
    model.mu = 3.25;
    GridSpec grid{0.0, 0.01, 10, 0.01, 4};
    auto inputs = hspde::prepare_inputs(model, grid, 1);
    CHECK(hspde::numint_value(model, grid, inputs, 0, 0.0) == 3.25);   // empty sums
    CHECK(hspde::numint_value(model, grid, inputs, 10, 0.5) == 3.25);  // zero kernels
    CHECK_THROWS_AS(hspde::numint_value(model, grid, inputs, 3, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(hspde::numint_value(model, grid, inputs, 11, 0.0), std::invalid_argument);
}

TEST_CASE("lambda = 1 boundaries agree bit for bit") {
    HSPDEModel model;
    model.mu = 0.4;
    model.g = KernelSpec::bjerksund(1.0, 1.0, 0.01);
    model.p = KernelSpec::exponential(0.3);
    model.a_model = VolatilityModel::constant(0.7);
    model.sigma_model = VolatilityModel::ou_subordinator(
        0.5, DriverSpec::inverse_gaussian(2.0, 1.0, false));
    model.driver = DriverSpec::inverse_gaussian(15.0, 1.0);
    GridSpec grid{0.0, 0.01, 60, 0.01, 30};
    auto inputs = hspde::prepare_inputs(model, grid, 404);
    auto fd = hspde::solve_with(model, grid, inputs, 404);
    auto ni = hspde::numint_boundary(model, grid, inputs);
    REQUIRE(ni.size() == fd.boundary.size());
    for (std::size_t n = 0; n < ni.size(); ++n) CHECK(fd.boundary[n] == ni[n]);
}

TEST_CASE("exact OU path") {
    SUBCASE("alpha = 0 degenerates to the scaled random walk") {
        GridSpec grid{0.0, 0.25, 8, 0.25, 0};
        std::vector<double> z = {1.0, -2.0, 0.5, 0.25, -1.0, 3.0, 0.0, 1.5};
        auto x = hspde::exact_ou_path(0.0, 2.0, grid, z);
        double acc = 0.0;
        for (std::size_t n = 0; n < 8; ++n) {
            acc += 2.0 * std::sqrt(0.25) * z[n];
            CHECK(x[n + 1] == doctest::Approx(acc).epsilon(1e-15));
        }
    }
    SUBCASE("one-step conditional variance") {
        // Var[X_{n+1} - e^{-a dt} X_n] = (1 - e^{-2 a dt})/(2a) at a = 1, dt = 0.01.
        double v = -std::expm1(-2.0 * 0.01) / 2.0;
        CHECK(v == doctest::Approx(0.009901).epsilon(1e-4));
        GridSpec grid{0.0, 0.01, 2, 0.01, 0};
        std::vector<double> z = {1.0, 1.0};
        auto x = hspde::exact_ou_path(1.0, 1.0, grid, z);
        CHECK(x[1] == doctest::Approx(std::sqrt(v)).epsilon(1e-14));
        CHECK(x[2] == doctest::Approx(std::exp(-0.01) * x[1] + std::sqrt(v)).epsilon(1e-14));
    }
    SUBCASE("long-run variance approaches sigma^2/(2 alpha)") {
        GridSpec grid{0.0, 0.05, 40000, 0.05, 0};
        auto z = hspde::standard_normals(grid.n_steps, 2, "levy");
        auto x = hspde::exact_ou_path(1.0, 1.0, grid, z);
        double m = std::accumulate(x.begin() + 2000, x.end(), 0.0)
                 / static_cast<double>(x.size() - 2000);
        double var = 0.0;
        for (std::size_t n = 2000; n < x.size(); ++n) var += (x[n] - m) * (x[n] - m);
        var /= static_cast<double>(x.size() - 2000);
        CHECK(var == doctest::Approx(0.5).epsilon(0.1));
    }
    SUBCASE("argument checks") {
        GridSpec grid{0.0, 0.01, 4, 0.01, 0};
        std::vector<double> too_short = {1.0};
        CHECK_THROWS_AS(hspde::exact_ou_path(1.0, 1.0, grid, too_short), std::invalid_argument);
    }
}

TEST_CASE("moment formulas") {
    SUBCASE("pure level") {
        HSPDEModel model;
        model.mu = 5.0;
        GridSpec grid{0.0, 0.01, 100, 0.01, 0};
        auto m = hspde::moments_formula(model, grid, 1.0);
        CHECK(m.mean == doctest::Approx(5.0));
        CHECK(m.second == doctest::Approx(25.0));
    }
    SUBCASE("exponential kernel closed form") {
        HSPDEModel model;
        model.g = KernelSpec::exponential(0.8);
        GridSpec grid{0.0, 0.01, 100, 0.01, 0};
        for (double t : {0.25, 1.0}) {
            auto m = hspde::moments_formula(model, grid, t);
            CHECK(m.mean == 0.0);
            CHECK(m.second == doctest::Approx(-std::expm1(-2.0 * 0.8 * t) / 1.6).epsilon(1e-9));
        }
    }
    SUBCASE("drift kernel contributes to the mean") {
        HSPDEModel model;
        model.mu = 1.0;
        model.p = KernelSpec::exponential(2.0);
        model.a_model = VolatilityModel::constant(3.0);
        GridSpec grid{0.0, 0.01, 100, 0.01, 0};
        auto m = hspde::moments_formula(model, grid, 1.0);
        CHECK(m.mean == doctest::Approx(1.0 + 3.0 * -std::expm1(-2.0) / 2.0).epsilon(1e-9));
    }
    SUBCASE("stationary OU variance enters the second moment") {
        HSPDEModel model;
        model.g = KernelSpec::bjerksund(1.0, 1.0, 0.01);
        model.sigma_model = VolatilityModel::ou_subordinator(
            0.01, DriverSpec::inverse_gaussian(15.0, 1.0, false));
        GridSpec grid{0.0, 0.01, 100, 0.01, 0};
        auto m = hspde::moments_formula(model, grid, 1.0);
        double g2 = hspde::integrate(
            [&](double u) { return model.g(u) * model.g(u); }, 0.0, 1.0);
        CHECK(m.second == doctest::Approx(1500.0 * g2).epsilon(1e-9));
    }
    SUBCASE("tabulated volatility is unsupported") {
        HSPDEModel model;
        model.g = KernelSpec::exponential(1.0);
        model.sigma_model = VolatilityModel::tabulated({1.0, 1.0});
        GridSpec grid{0.0, 0.01, 1, 0.01, 0};
        CHECK_THROWS_AS(hspde::moments_formula(model, grid, 0.01), std::invalid_argument);
    }
}

TEST_CASE("truncation error") {
    HSPDEModel model;
    model.g = KernelSpec::exponential(1.0);

    SUBCASE("infinite history means no truncation") {
        CHECK(hspde::truncation_error(model, 1.0, -std::numeric_limits<double>::infinity()) == 0.0);
    }
    SUBCASE("closed form for the exponential tail") {
        for (double u0 : {0.5, 1.0, 3.0})
            CHECK(hspde::truncation_error(model, 1.0, 1.0 - u0)
                  == doctest::Approx(std::exp(-2.0 * u0) / 2.0).epsilon(1e-8));
    }
    SUBCASE("r = t keeps the full norm") {
        CHECK(hspde::truncation_error(model, 2.0, 2.0) == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("monotone decay to zero") {
        HSPDEModel bj;
        bj.g = KernelSpec::bjerksund(1.0, 1.0, 0.01);
        double prev = hspde::truncation_error(bj, 0.0, 0.0);
        for (double u0 : {5.0, 50.0, 500.0, 2000.0}) {
            double cur = hspde::truncation_error(bj, 0.0, -u0);
            CHECK(cur < prev);
            prev = cur;
        }
        CHECK(prev < 1e-6);
    }
}

TEST_CASE("truncation constant") {
    HSPDEModel model;
    model.g = KernelSpec::exponential(1.0);
    model.a_model = VolatilityModel::constant(3.0);
    model.driver = DriverSpec::brownian(2.0);
    // max(1, E[a^2], E[L^2(1)] E[sigma^2]) = max(1, 9, 2) = 9.
    CHECK(hspde::truncation_constant(model) == doctest::Approx(9.0));
}

TEST_CASE("error budget") {
    GridSpec grid{0.0, 0.01, 100, 0.01, 10};

    SUBCASE("lambda = 1 removes the transport term") {
        HSPDEModel model;
        model.g = KernelSpec::exponential(1.0);
        auto b = hspde::error_budget(model, grid, 100);
        CHECK(b.total == doctest::Approx(b.c2 * 0.01 * 0.01 + b.c3 * b.mod_a
                                         + b.c4 * b.mod_sigma));
        CHECK(b.mod_sigma == 0.0);  // constant sigma
        CHECK(b.mod_a == 0.0);
    }
    SUBCASE("deterministic coefficients leave only grid terms") {
        HSPDEModel model;
        model.g = KernelSpec::exponential(1.0);
        GridSpec half{0.0, 0.005, 100, 0.01, 10};
        auto b = hspde::error_budget(model, half, 100);
        CHECK(b.total == doctest::Approx(b.c1 * 0.005 + b.c2 * 0.005 * 0.005));
    }
    SUBCASE("constants follow the stated formulas") {
        HSPDEModel model;
        model.g = KernelSpec::exponential(1.0);
        model.driver = DriverSpec::brownian(2.0);
        auto b = hspde::error_budget(model, grid, 50);
        double tau = 0.5, qv = 2.0 * tau;
        double l = b.lipschitz, k = b.sup_bound_k;
        CHECK(b.qvar == doctest::Approx(qv));
        CHECK(b.c1 == doctest::Approx(3.0 * l * tau * (1.0 + 4.0 * tau * tau + 4.0 * qv)));
        CHECK(b.c2 == doctest::Approx(12.0 * l * (tau * tau + qv)));
        CHECK(b.c3 == doctest::Approx(12.0 * k * l * tau * tau));
        CHECK(b.c4 == doctest::Approx(12.0 * k * qv));
    }
    SUBCASE("halving both steps at fixed lambda shrinks the bound") {
        HSPDEModel model;
        model.g = KernelSpec::bjerksund(1.0, 1.0, 0.01);
        model.sigma_model = VolatilityModel::ou_subordinator(
            0.01, DriverSpec::inverse_gaussian(15.0, 1.0, false));
        GridSpec coarse{0.0, 0.01, 100, 0.02, 10};
        GridSpec fine{0.0, 0.005, 200, 0.01, 20};
        CHECK(hspde::error_budget(model, fine, 200).total
              < hspde::error_budget(model, coarse, 100).total);
    }
    SUBCASE("singular kernels are rejected with a pointer to the fix") {
        HSPDEModel model;
        model.g = KernelSpec::power_fbm(0.25);
        try {
            hspde::error_budget(model, grid, 100);
            FAIL("singular kernel accepted");
        } catch (const hspde::SingularityError& e) {
            CHECK(std::string(e.what()).find("RegularizedFBm") != std::string::npos);
        }
    }
}
