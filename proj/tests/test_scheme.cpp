#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "hspde/rng.hpp"
#include "hspde/scheme.hpp"

using hspde::BoundaryMode;
using hspde::DriverSpec;
using hspde::Field;
using hspde::GridSpec;
using hspde::HSPDEModel;
using hspde::KernelSpec;
using hspde::VolatilityModel;

TEST_CASE("grid validation enforces the CFL condition") {
    CHECK(hspde::validate_grid({0.0, 0.01, 10, 0.01, 5}).lambda() == 1.0);
    CHECK(hspde::validate_grid({0.0, 0.005, 10, 0.01, 5}).lambda() == doctest::Approx(0.5));
    try {
        hspde::validate_grid({0.0, 0.02, 10, 0.01, 5});
        FAIL("lambda = 2 grid accepted");
    } catch (const hspde::CflError& e) {
        CHECK(e.lambda == doctest::Approx(2.0));
    }
    CHECK_THROWS_AS(hspde::validate_grid({0.0, 0.0, 10, 0.01, 5}), std::invalid_argument);
}

TEST_CASE("grid coordinates come from index arithmetic") {
    GridSpec g{1.0, 0.1, 100, 0.25, 8};
    CHECK(g.time(0) == 1.0);
    CHECK(g.time(100) == 1.0 + 100 * 0.1);
    CHECK(g.x(8) == 8 * 0.25);
    CHECK(g.horizon() == g.time(100) - 1.0);
}

TEST_CASE("fd_step base cases") {
    std::vector<double> zero4(4, 0.0);

    // Pure transport at lambda = 1: shift left by one.
    std::vector<double> row = {1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> out(4);
    hspde::fd_step(row, zero4, zero4, 0.0, 1.0, 0.1, out);
    CHECK(out == std::vector<double>{2.0, 3.0, 4.0, 5.0});

    // Constant row, beta = 1, dM = 0.3: every output cell c + 0.3.
    std::vector<double> crow(5, 2.0);
    std::vector<double> ones(4, 1.0);
    hspde::fd_step(crow, zero4, ones, 0.3, 1.0, 0.1, out);
    for (double v : out) CHECK(v == doctest::Approx(2.3));

    // Convex combination at lambda = 0.5.
    std::vector<double> pair = {0.0, 1.0};
    std::vector<double> one(1);
    hspde::fd_step(pair, zero4, zero4, 0.0, 0.5, 0.1, one);
    CHECK(one[0] == 0.5);

    CHECK_THROWS_AS(hspde::fd_step(one, zero4, zero4, 0.0, 0.5, 0.1, out),
                    std::invalid_argument);
    std::vector<double> short_coeff(2);
    CHECK_THROWS_AS(hspde::fd_step(row, short_coeff, zero4, 0.0, 0.5, 0.1, out),
                    std::invalid_argument);
}

TEST_CASE("transport exactness at lambda = 1") {
    hspde::Rng rng(hspde::derive_seed(1, "transport"));
    std::vector<double> row(40);
    for (auto& v : row) v = rng.normal();
    std::vector<double> initial = row;
    std::vector<double> zero(40, 0.0);
    std::vector<double> next(40);
    for (std::size_t n = 1; n < 8; ++n) {
        hspde::fd_step(std::span(row).first(41 - n), zero, zero, 0.0, 1.0, 0.1,
                       std::span(next).first(40 - n));
        std::swap(row, next);
        for (std::size_t j = 0; j + n < 40; ++j) CHECK(row[j] == initial[j + n]);
    }
}

TEST_CASE("zero kernels give a constant field") {
    HSPDEModel model;
    model.mu = 2.5;
    GridSpec grid{0.0, 0.01, 20, 0.01, 6};
    Field f = hspde::solve(model, grid, 5);
    for (std::size_t n = 0; n <= 20; ++n) {
        CHECK(f.boundary[n] == 2.5);
        for (std::size_t j = 0; j <= 6; ++j) CHECK(f.at(n, j) == 2.5);
    }
}

TEST_CASE("initial row carries the level") {
    HSPDEModel model;
    model.mu = -1.25;
    model.g = KernelSpec::exponential(1.0);
    GridSpec grid{0.0, 0.01, 5, 0.01, 3};
    Field f = hspde::solve(model, grid, 5);
    for (std::size_t j = 0; j <= 3; ++j) CHECK(f.at(0, j) == -1.25);
}

TEST_CASE("stochastic volatility field of the stress-test configuration") {
    HSPDEModel model;
    model.g = KernelSpec::bjerksund(1.0, 1.0, 0.01);
    model.sigma_model = VolatilityModel::ou_subordinator(
        0.01, DriverSpec::inverse_gaussian(15.0, 1.0, false));
    GridSpec grid{0.0, 0.01, 100, 0.01, 200};
    Field f = hspde::solve(model, grid, 99);
    CHECK(f.boundary.size() == 101);
    CHECK(f.cols == 201);
    CHECK(f.values.size() == 101u * 201u);
    for (double v : f.values) CHECK(std::isfinite(v));
    CHECK(f.warnings.empty());
}

TEST_CASE("zero_at_xJ pins the far column and warns on heavy tails") {
    HSPDEModel model;
    model.g = KernelSpec::exponential(10.0);
    model.boundary = BoundaryMode::ZeroAtXJ;
    GridSpec grid{0.0, 0.01, 30, 0.01, 200};  // x_J = 2, tail e^{-40}/20
    Field f = hspde::solve(model, grid, 3);
    CHECK(f.warnings.empty());
    for (std::size_t n = 1; n <= 30; ++n) {
        CHECK(f.at(n, 200) == 0.0);
        CHECK(f.pinned[n * f.cols + 200] == 1);
    }

    HSPDEModel slow = model;
    slow.g = KernelSpec::exponential(0.01);  // tail at x_J = 2 far above 1e-12
    Field g = hspde::solve(slow, grid, 3);
    REQUIRE(g.warnings.size() == 1);
    CHECK(g.warnings[0].find("zero_at_xJ") != std::string::npos);
}

TEST_CASE("binomial operator") {
    std::vector<double> f = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};

    SUBCASE("lambda = 1 is the pure shift") {
        for (std::size_t m : {0, 1, 3, 7})
            CHECK(hspde::apply_T_power(f, m, 1.0, 0) == f[m]);
    }
    SUBCASE("m = 0 is the identity") {
        CHECK(hspde::apply_T_power(f, 0, 0.5, 3) == f[3]);
    }
    SUBCASE("linear functions map to x + m dt") {
        double dx = 0.25;
        for (double lam : {0.25, 0.5, 1.0}) {
            std::vector<double> lin(80);
            for (std::size_t k = 0; k < lin.size(); ++k) lin[k] = k * dx;
            for (std::size_t m : {1, 5, 64}) {
                double expect = 2 * dx + m * lam * dx;  // x_2 + m dt
                CHECK(hspde::apply_T_power(lin, m, lam, 2)
                      == doctest::Approx(expect).epsilon(1e-13));
            }
        }
    }
    SUBCASE("matches the iterated operator") {
        for (double lam : {0.3, 0.5, 1.0})
            for (std::size_t m : {0, 1, 2, 5})
                CHECK(hspde::apply_T_power(f, m, lam, 1)
                      == doctest::Approx(hspde::apply_T_iterated(f, m, lam, 1)).epsilon(1e-14));
    }
    SUBCASE("insufficient tabulation range") {
        CHECK_THROWS_AS(hspde::apply_T_power(f, 8, 0.5, 0), std::invalid_argument);
        CHECK_THROWS_AS(hspde::apply_T_power(f, 4, 0.5, 4), std::invalid_argument);
    }
}

TEST_CASE("closed-form representation") {
    HSPDEModel model;
    model.mu = 0.7;
    model.g = KernelSpec::exponential(1.3);
    model.p = KernelSpec::bjerksund(1.0, 1.0, 0.01);
    model.a_model = VolatilityModel::constant(0.5);
    GridSpec grid{0.0, 0.05, 8, 0.08, 8};
    auto inputs = hspde::prepare_inputs(model, grid, 17);
    Field f = hspde::solve_with(model, grid, inputs, 17);

    SUBCASE("n = 0 returns the level") {
        for (std::size_t j = 0; j <= 8; ++j)
            CHECK(hspde::representation_sum(model, grid, inputs, 0, j) == 0.7);
    }
    SUBCASE("n = 1 equals one explicit step") {
        for (std::size_t j = 0; j <= 8; ++j)
            CHECK(hspde::representation_sum(model, grid, inputs, 1, j)
                  == doctest::Approx(f.at(1, j)).epsilon(1e-14));
    }
    SUBCASE("random instance matches the iterative solve") {
        for (std::size_t n = 0; n <= 8; ++n)
            for (std::size_t j = 0; j <= 8; ++j) {
                double rep = hspde::representation_sum(model, grid, inputs, n, j);
                double scale = std::max(1.0, std::abs(f.at(n, j)));
                CHECK(std::abs(rep - f.at(n, j)) < 1e-10 * scale);
            }
    }
    SUBCASE("out-of-grid indices are rejected") {
        CHECK_THROWS_AS(hspde::representation_sum(model, grid, inputs, 9, 0),
                        std::invalid_argument);
        CHECK_THROWS_AS(hspde::representation_sum(model, grid, inputs, 0, 9),
                        std::invalid_argument);
    }
}

TEST_CASE("shift consistency on a dyadic lattice") {
    // Column k of a solve equals the boundary of the same model with kernels
    // pre-shifted by k dx, exactly, when dx is a power of two.
    const double dx = 0.015625;  // 2^-6
    GridSpec grid{0.0, dx, 24, dx, 12};
    HSPDEModel model;
    model.mu = 0.3;
    model.g = KernelSpec::bjerksund(1.0, 1.0, 0.01);
    model.p = KernelSpec::exponential(0.5);
    model.a_model = VolatilityModel::constant(1.0);
    auto inputs = hspde::prepare_inputs(model, grid, 23);
    Field base = hspde::solve_with(model, grid, inputs, 23);

    for (std::size_t k : {1, 5, 12}) {
        HSPDEModel shifted = model;
        shifted.g = model.g.shifted(k * dx);
        shifted.p = model.p.shifted(k * dx);
        Field fs = hspde::solve_with(shifted, grid, inputs, 23);
        for (std::size_t n = 0; n <= 24; ++n) CHECK(fs.boundary[n] == base.at(n, k));
    }
}

TEST_CASE("the solution is affine in the volatility scale") {
    const double mu = 1.5;
    GridSpec grid{0.0, 0.02, 16, 0.02, 8};
    HSPDEModel m1;
    m1.mu = mu;
    m1.g = KernelSpec::exponential(0.8);
    HSPDEModel m2 = m1;
    m2.sigma_model = VolatilityModel::constant(2.0);
    auto inputs = hspde::prepare_inputs(m1, grid, 31);
    auto inputs2 = hspde::prepare_inputs(m2, grid, 31);
    Field f1 = hspde::solve_with(m1, grid, inputs, 31);
    Field f2 = hspde::solve_with(m2, grid, inputs2, 31);
    for (std::size_t n = 0; n <= 16; ++n)
        for (std::size_t j = 0; j <= 8; ++j)
            CHECK(f2.at(n, j) - mu == doctest::Approx(2.0 * (f1.at(n, j) - mu)).epsilon(1e-12));
}

TEST_CASE("field round trips through the binary dump") {
    HSPDEModel model;
    model.mu = 0.2;
    model.g = KernelSpec::exponential(1.0);
    GridSpec grid{0.0, 0.01, 12, 0.02, 5};
    Field f = hspde::solve(model, grid, 8);
    auto dir = std::filesystem::temp_directory_path() / "hspde_test_field";
    std::filesystem::create_directories(dir);
    hspde::write_field_bin(dir / "f.bin", f);
    Field r = hspde::read_field_bin(dir / "f.bin");
    CHECK(r.grid.n_steps == f.grid.n_steps);
    CHECK(r.grid.j_nodes == f.grid.j_nodes);
    CHECK(r.grid.dt == f.grid.dt);
    CHECK(r.grid.dx == f.grid.dx);
    CHECK(r.values == f.values);
    CHECK(r.boundary == f.boundary);
    hspde::write_field_csv(dir / "f.csv", f);
    CHECK(std::filesystem::file_size(dir / "f.csv") > 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("solves are reproducible from the seed") {
    HSPDEModel model;
    model.g = KernelSpec::bjerksund(1.0, 1.0, 0.01);
    model.sigma_model = VolatilityModel::ou_subordinator(
        0.5, DriverSpec::inverse_gaussian(2.0, 1.0, false));
    GridSpec grid{0.0, 0.01, 50, 0.01, 20};
    Field a = hspde::solve(model, grid, 1234);
    Field b = hspde::solve(model, grid, 1234);
    CHECK(a.values == b.values);
    Field c = hspde::solve(model, grid, 1235);
    CHECK(a.values != c.values);
}
