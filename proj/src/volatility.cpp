#include "hspde/volatility.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "hspde/rng.hpp"

namespace hspde {

VolatilityModel VolatilityModel::constant(double value) {
    VolatilityModel m;
    m.kind_ = Kind::Constant;
    m.value_ = value;
    return m;
}

VolatilityModel VolatilityModel::tabulated(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("tabulated volatility: empty table");
    VolatilityModel m;
    m.kind_ = Kind::Tabulated;
    m.table_ = std::move(values);
    return m;
}

VolatilityModel VolatilityModel::ou_subordinator(double lambda, DriverSpec subordinator,
                                                 double burn_in_tol) {
    if (!(lambda > 0.0)) throw std::invalid_argument("OU volatility: lambda must be > 0");
    if (subordinator.kind() == DriverSpec::Kind::Brownian)
        throw std::invalid_argument("OU volatility: the driver must be a subordinator (IG or compound Poisson)");
    if (!(burn_in_tol > 0.0 && burn_in_tol < 1.0))
        throw std::invalid_argument("OU volatility: burn_in_tol must be in (0,1)");
    VolatilityModel m;
    m.kind_ = Kind::OUSubordinator;
    m.lambda_ = lambda;
    m.subordinator_ = subordinator;
    m.burn_in_tol_ = burn_in_tol;
    return m;
}

VolatilityModel VolatilityModel::with_initial_z(double z0) const {
    if (kind_ != Kind::OUSubordinator)
        throw std::invalid_argument("with_initial_z: OU-subordinator models only");
    if (!(z0 >= 0.0)) throw std::invalid_argument("with_initial_z: Z(t0) must be >= 0");
    VolatilityModel m = *this;
    m.z0_override_ = z0;
    return m;
}

namespace {

double draw_raw_increment(Rng& rng, const DriverSpec& d, double step) {
    switch (d.kind()) {
        case DriverSpec::Kind::InverseGaussian: {
            double mu = d.ig_delta() * step / d.ig_gamma();
            double lam = d.ig_delta() * step * d.ig_delta() * step;
            return rng.inverse_gaussian(mu, lam);
        }
        case DriverSpec::Kind::CompoundPoisson: {
            double mean = d.cp_rho() * step;
            if (mean == 0.0) return 0.0;
            std::uint64_t count = rng.poisson(mean);
            double m = d.cp_jump_mean();
            double var = d.cp_jump_sq() - m * m;
            if (var <= 0.0) return static_cast<double>(count) * m;
            double theta = var / m;
            double k = m / theta;
            double sum = 0.0;
            for (std::uint64_t i = 0; i < count; ++i) sum += rng.gamma(k, theta);
            return sum;
        }
        case DriverSpec::Kind::Brownian:
            break;
    }
    throw std::invalid_argument("subordinator increments require an IG or compound Poisson driver");
}

}  // namespace

std::vector<double> simulate_variance_path(const VolatilityModel& v, double dt, std::size_t n_steps,
                                           std::uint64_t root_seed, std::string_view stream_id) {
    if (v.kind() != VolatilityModel::Kind::OUSubordinator)
        throw std::invalid_argument("simulate_variance_path: OU-subordinator models only");
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_variance_path: dt must be > 0");
    const double lam = v.mean_reversion();
    const DriverSpec& sub = v.subordinator();

    double z = 0.0;
    if (v.z0_override() >= 0.0) {
        z = v.z0_override();
    } else {
        // Burn-in of length T_b with e^{-lambda T_b} <= burn_in_tol, started
        // from the stationary mean. The burn-in step is coarser than the grid
        // step (lambda * h <= 0.05) and uses the midpoint weight, which has
        // O((lambda h)^2) bias on the stationary mean versus O(lambda h) for
        // the left-point weight.
        double t_burn = std::log(1.0 / v.burn_in_tol()) / lam;
        double h = std::min(0.05 / lam, t_burn);
        auto steps = static_cast<std::size_t>(std::ceil(t_burn / h));
        if (steps < 1) steps = 1;
        h = t_burn / static_cast<double>(steps);
        double decay = std::exp(-lam * h);
        double w_mid = std::exp(-lam * h / 2.0);
        z = sub.raw_mean_rate() / lam;
        Rng rng(derive_seed(root_seed, std::string(stream_id) + ".burnin"));
        for (std::size_t i = 0; i < steps; ++i)
            z = decay * z + w_mid * draw_raw_increment(rng, sub, h);
    }

    std::vector<double> path(n_steps + 1);
    path[0] = z;
    double decay = std::exp(-lam * dt);
    Rng rng(derive_seed(root_seed, stream_id));
    for (std::size_t n = 0; n < n_steps; ++n) {
        double du = draw_raw_increment(rng, sub, dt);
        z = decay * z + decay * du;
        path[n + 1] = z;
    }
    return path;
}

namespace {

std::vector<double> sample_one(const VolatilityModel& m, const GridSpec& grid,
                               std::uint64_t root_seed, std::string_view stream_id,
                               bool take_sqrt) {
    std::size_t len = grid.n_steps + 1;
    switch (m.kind()) {
        case VolatilityModel::Kind::Constant:
            return std::vector<double>(len, m.value());
        case VolatilityModel::Kind::Tabulated: {
            if (m.table().size() < len)
                throw std::invalid_argument("tabulated volatility: table shorter than the grid");
            return {m.table().begin(), m.table().begin() + static_cast<std::ptrdiff_t>(len)};
        }
        case VolatilityModel::Kind::OUSubordinator: {
            auto z = simulate_variance_path(m, grid.dt, grid.n_steps, root_seed, stream_id);
            if (take_sqrt)
                for (auto& v : z) v = std::sqrt(v);
            return z;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

PathPair simulate_paths(const VolatilityModel& sigma_model, const VolatilityModel& a_model,
                        const GridSpec& grid, std::uint64_t root_seed) {
    PathPair p;
    p.seed = root_seed;
    p.sigma = sample_one(sigma_model, grid, root_seed, "subordinator", true);
    p.a = sample_one(a_model, grid, root_seed, "subordinator_a", false);
    return p;
}

std::pair<double, double> stationary_moments(const VolatilityModel& v) {
    if (v.kind() != VolatilityModel::Kind::OUSubordinator)
        throw std::invalid_argument("stationary_moments: OU-subordinator models only");
    double m_u = v.subordinator().raw_mean_rate();
    double c_u = v.subordinator().variance_rate();
    double lam = v.mean_reversion();
    return {m_u / lam, c_u / (2.0 * lam)};
}

double sigma_modulus_bound(const VolatilityModel& v, double dt) {
    if (v.kind() != VolatilityModel::Kind::OUSubordinator)
        throw std::invalid_argument("sigma_modulus_bound: OU-subordinator models only");
    if (!(dt >= 0.0)) throw std::invalid_argument("sigma_modulus_bound: dt must be >= 0");
    double m_u = v.subordinator().raw_mean_rate();
    double c_u = v.subordinator().variance_rate();
    double c = c_u + m_u * m_u;  // E[U(1)^2]
    double lam = v.mean_reversion();
    return 2.0 * c / lam * (-std::expm1(-lam * dt / 2.0));
}

void write_paths_csv(const std::filesystem::path& path, const GridSpec& grid, const PathPair& p) {
    if (p.a.size() != grid.n_steps + 1 || p.sigma.size() != grid.n_steps + 1)
        throw std::invalid_argument("write_paths_csv: path lengths do not match the grid");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "# seed=" << p.seed << "\n";
    out << "t,a,sigma\n";
    char buf[128];
    for (std::size_t n = 0; n <= grid.n_steps; ++n) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.time(n), p.a[n], p.sigma[n]);
        out << buf;
    }
}

PathPair read_paths_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    PathPair p;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("seed=");
            if (pos != std::string::npos) p.seed = std::stoull(line.substr(pos + 5));
            continue;
        }
        if (line.rfind("t,", 0) == 0) continue;
        double t, a, s;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &a, &s) != 3)
            throw std::runtime_error("bad path row in " + path.string() + ": " + line);
        p.a.push_back(a);
        p.sigma.push_back(s);
    }
    return p;
}

}  // namespace hspde
