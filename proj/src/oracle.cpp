#include "hspde/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "hspde/quadrature.hpp"

namespace hspde {

double numint_value(const HSPDEModel& model, const GridSpec& grid, const SolveInputs& inputs,
                    std::size_t n, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("numint_value: x must be >= 0");
    if (n > grid.n_steps) throw std::invalid_argument("numint_value: n beyond the grid");
    const double m = inputs.drift_rate;
    double acc = model.mu;  // shift semigroup applied to Y0 = 0 plus level
    for (std::size_t i = 0; i < n; ++i) {
        // t_n - t_{i+1} + x from index arithmetic, matching the FD lattice.
        double u = static_cast<double>(n - 1 - i) * grid.dt + x;
        double pu = model.p(u);
        double gu = model.g(u);
        double a_i = inputs.paths.a[i];
        double s_i = inputs.paths.sigma[i];
        acc = accumulate_step(acc, alpha_coeff(pu, gu, a_i, s_i, m), beta_coeff(gu, s_i),
                              grid.dt, inputs.dM[i]);
    }
    return acc;
}

std::vector<double> numint_boundary(const HSPDEModel& model, const GridSpec& grid,
                                    const SolveInputs& inputs) {
    std::vector<double> out(grid.n_steps + 1);
    for (std::size_t n = 0; n <= grid.n_steps; ++n) out[n] = numint_value(model, grid, inputs, n, 0.0);
    return out;
}

std::vector<double> exact_ou_path(double alpha, double sigma_const, const GridSpec& grid,
                                  const std::vector<double>& normals) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("exact_ou_path: alpha must be >= 0");
    if (normals.size() < grid.n_steps)
        throw std::invalid_argument("exact_ou_path: not enough normals for the grid");
    double decay = std::exp(-alpha * grid.dt);
    // (1 - e^{-2 alpha dt}) / (2 alpha), with the alpha -> 0 limit dt.
    double var = alpha == 0.0 ? grid.dt : -std::expm1(-2.0 * alpha * grid.dt) / (2.0 * alpha);
    double sd = sigma_const * std::sqrt(var);
    std::vector<double> x(grid.n_steps + 1, 0.0);
    for (std::size_t n = 0; n < grid.n_steps; ++n) x[n + 1] = decay * x[n] + sd * normals[n];
    return x;
}

namespace {

double expected_a(const HSPDEModel& model) {
    switch (model.a_model.kind()) {
        case VolatilityModel::Kind::Constant:
            return model.a_model.value();
        case VolatilityModel::Kind::OUSubordinator:
            return stationary_moments(model.a_model).first;
        case VolatilityModel::Kind::Tabulated:
            break;
    }
    throw std::invalid_argument("moments_formula: tabulated a process is unsupported");
}

double expected_sigma_sq(const HSPDEModel& model) {
    switch (model.sigma_model.kind()) {
        case VolatilityModel::Kind::Constant: {
            double s = model.sigma_model.value();
            return s * s;
        }
        case VolatilityModel::Kind::OUSubordinator:
            // E[sigma^2] = E[Z] = stationary mean.
            return stationary_moments(model.sigma_model).first;
        case VolatilityModel::Kind::Tabulated:
            break;
    }
    throw std::invalid_argument("moments_formula: tabulated sigma process is unsupported");
}

}  // namespace

Moments moments_formula(const HSPDEModel& model, const GridSpec& grid, double t) {
    double tau = t - grid.t0;
    if (!(tau >= 0.0)) throw std::invalid_argument("moments_formula: t must be >= t0");
    double a_bar = expected_a(model);
    double m = model.driver.mean_rate();
    double sig2 = expected_sigma_sq(model);
    double p_int = 0.0;
    if (model.p.kind() != KernelSpec::Kind::Zero || m != 0.0) {
        // The compensated drift m g sigma contributes to the mean through the
        // same integral; for stochastic sigma, E[sigma] is not tracked, so the
        // mean formula supports m != 0 only with deterministic sigma.
        p_int = integrate([&](double u) { return model.p(u); }, 0.0, tau) * a_bar;
        if (m != 0.0) {
            if (model.sigma_model.kind() != VolatilityModel::Kind::Constant)
                throw std::invalid_argument(
                    "moments_formula: uncompensated driver with stochastic sigma is unsupported");
            p_int += m * model.sigma_model.value()
                   * integrate([&](double u) { return model.g(u); }, 0.0, tau);
        }
    }
    double mean = model.mu + p_int;
    double c1 = model.driver.variance_rate();
    double g2_int = 0.0;
    if (model.g.kind() != KernelSpec::Kind::Zero)
        g2_int = integrate([&](double u) { double g = model.g(u); return g * g; }, 0.0, tau);
    double second = mean * mean + c1 * sig2 * g2_int;
    return {mean, second};
}

double truncation_error(const HSPDEModel& model, double t, double r) {
    double horizon = t - r;
    if (!std::isfinite(horizon)) return 0.0;  // r -> -inf
    if (horizon < 0.0) throw std::invalid_argument("truncation_error: r must be <= t");
    return tail_norms(model.p, model.g, horizon).combined_sq();
}

double truncation_constant(const HSPDEModel& model) {
    double ea2;
    switch (model.a_model.kind()) {
        case VolatilityModel::Kind::Constant:
            ea2 = model.a_model.value() * model.a_model.value();
            break;
        case VolatilityModel::Kind::OUSubordinator: {
            auto [mz, vz] = stationary_moments(model.a_model);
            ea2 = mz * mz + vz;
            break;
        }
        default:
            throw std::invalid_argument("truncation_constant: tabulated a process is unsupported");
    }
    double el2 = model.driver.variance_rate() + model.driver.mean_rate() * model.driver.mean_rate();
    return std::max(1.0, std::max(ea2, el2 * expected_sigma_sq(model)));
}

namespace {

double lattice_modulus_sq(const std::vector<double>& table) {
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        double d = table[i + 1] - table[i];
        best = std::max(best, d * d);
    }
    return best;
}

double process_second_moment(const VolatilityModel& m) {
    switch (m.kind()) {
        case VolatilityModel::Kind::Constant:
            return m.value() * m.value();
        case VolatilityModel::Kind::OUSubordinator:
            // For sigma = sqrt(Z): E[sigma^2] = E[Z].
            return stationary_moments(m).first;
        case VolatilityModel::Kind::Tabulated: {
            double best = 0.0;
            for (double v : m.table()) best = std::max(best, v * v);
            return best;
        }
    }
    return 0.0;
}

double modulus_term(const VolatilityModel& m, double dt) {
    switch (m.kind()) {
        case VolatilityModel::Kind::Constant:
            return 0.0;
        case VolatilityModel::Kind::OUSubordinator:
            return sigma_modulus_bound(m, dt);
        case VolatilityModel::Kind::Tabulated:
            return lattice_modulus_sq(m.table());
    }
    return 0.0;
}

}  // namespace

ErrorBudget error_budget(const HSPDEModel& model, const GridSpec& grid, std::size_t n) {
    if (n > grid.n_steps) throw std::invalid_argument("error_budget: n beyond the grid");
    double domain_max = grid.x(grid.j_nodes) + static_cast<double>(grid.n_steps) * grid.dx;
    double lip_p, lip_g;
    try {
        lip_p = model.p.lipschitz_constant(domain_max);
        lip_g = model.g.lipschitz_constant(domain_max);
    } catch (const SingularityError&) {
        throw SingularityError(
            "error_budget: kernel is not Lipschitz on the solve domain; use RegularizedFBm");
    }
    double ea2 = process_second_moment(model.a_model);
    double es2 = process_second_moment(model.sigma_model);

    ErrorBudget b{};
    // Squared-sense Lipschitz constant of the separated coefficients.
    b.lipschitz = std::max(lip_p * lip_p * ea2, lip_g * lip_g * es2);
    double sup_p = model.p.sup_bound(domain_max);
    double sup_g = model.g.sup_bound(domain_max);
    b.sup_bound_k = std::max(1.0, std::max(sup_p * sup_p, sup_g * sup_g));
    double tau = static_cast<double>(n) * grid.dt;
    b.qvar = model.driver.variance_rate() * tau;
    double l = b.lipschitz, k = b.sup_bound_k;
    b.c1 = 3.0 * l * tau * (1.0 + 4.0 * tau * tau + 4.0 * b.qvar);
    b.c2 = 12.0 * l * (tau * tau + b.qvar);
    b.c3 = 12.0 * k * l * tau * tau;
    b.c4 = 12.0 * k * b.qvar;
    b.mod_a = modulus_term(model.a_model, grid.dt);
    b.mod_sigma = modulus_term(model.sigma_model, grid.dt);
    b.total = b.c1 * (grid.dx - grid.dt) + b.c2 * grid.dt * grid.dt + b.c3 * b.mod_a
            + b.c4 * b.mod_sigma;
    return b;
}

}  // namespace hspde
