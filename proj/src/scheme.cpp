#include "hspde/scheme.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hspde {

GridSpec validate_grid(const GridSpec& g) {
    if (!(g.dt > 0.0)) throw std::invalid_argument("grid: dt must be > 0");
    if (!(g.dx > 0.0)) throw std::invalid_argument("grid: dx must be > 0");
    if (g.dt > g.dx) {
        std::ostringstream os;
        os << "CFL condition violated: dt = " << g.dt << " > dx = " << g.dx
           << " (lambda = " << g.lambda() << " > 1)";
        throw CflError(g.lambda(), os.str());
    }
    return g;
}

SolveInputs prepare_inputs(const HSPDEModel& model, const GridSpec& grid, std::uint64_t seed) {
    SolveInputs in;
    in.drift_rate = model.driver.mean_rate();
    if (grid.n_steps > 0) {
        IncrementStream s = sample_increments(model.driver, grid.dt, grid.n_steps, seed, "levy");
        in.dM = std::move(s.values);
        if (in.drift_rate != 0.0)
            for (auto& v : in.dM) v -= in.drift_rate * grid.dt;
    }
    in.paths = simulate_paths(model.sigma_model, model.a_model, grid, seed);
    return in;
}

void fd_step(std::span<const double> row, std::span<const double> alpha,
             std::span<const double> beta, double dM, double lambda, double dt,
             std::span<double> out) {
    if (row.size() < 2) throw std::invalid_argument("fd_step: row needs at least 2 entries");
    std::size_t w = row.size() - 1;
    if (alpha.size() < w || beta.size() < w || out.size() < w)
        throw std::invalid_argument("fd_step: misaligned row/coefficient lengths");
    double one_minus = 1.0 - lambda;
    for (std::size_t j = 0; j < w; ++j) {
        double base = lambda * row[j + 1] + one_minus * row[j];
        out[j] = accumulate_step(base, alpha[j], beta[j], dt, dM);
    }
}

namespace {

std::vector<double> tabulate_kernel(const KernelSpec& k, const GridSpec& grid, std::size_t width) {
    std::vector<double> v(width);
    for (std::size_t j = 0; j < width; ++j) v[j] = k(grid.x(j));
    return v;
}

}  // namespace

Field solve_with(const HSPDEModel& model, const GridSpec& grid, const SolveInputs& inputs,
                 std::uint64_t seed, bool keep_field) {
    validate_grid(grid);
    const std::size_t n_steps = grid.n_steps;
    const std::size_t cols = grid.j_nodes + 1;
    const bool extended = model.boundary == BoundaryMode::ExtendedTriangle;
    const std::size_t width0 = extended ? cols + n_steps : cols;
    const double lam = grid.lambda();

    Field f;
    f.grid = grid;
    f.cols = cols;
    f.seed = seed;
    f.boundary.assign(n_steps + 1, model.mu);
    if (keep_field) {
        f.values.assign((n_steps + 1) * cols, model.mu);
        f.pinned.assign((n_steps + 1) * cols, 0);
    }

    if (!extended) {
        // y_J^n = 0 needs x_J beyond the kernel tails to be a good boundary.
        try {
            TailNorms tn = tail_norms(model.p, model.g, grid.x(grid.j_nodes));
            if (tn.combined_sq() > 1e-12) {
                std::ostringstream os;
                os << "zero_at_xJ: kernel tail norm " << tn.combined_sq() << " beyond x_J = "
                   << grid.x(grid.j_nodes) << " exceeds 1e-12; boundary truncation error may dominate";
                f.warnings.push_back(os.str());
            }
        } catch (const DivergenceError& e) {
            f.warnings.push_back(std::string("zero_at_xJ: ") + e.what());
        }
    }

    std::vector<double> pv = tabulate_kernel(model.p, grid, width0);
    std::vector<double> gv = tabulate_kernel(model.g, grid, width0);

    const double m = inputs.drift_rate;
    std::vector<double> row(width0, model.mu);
    std::vector<double> next(width0, 0.0);
    std::vector<double> alpha(width0, 0.0), beta(width0, 0.0);

    for (std::size_t n = 0; n < n_steps; ++n) {
        const double a_n = inputs.paths.a[n];
        const double s_n = inputs.paths.sigma[n];
        const std::size_t in_width = extended ? width0 - n : cols;
        const std::size_t out_width = in_width - 1;
        for (std::size_t j = 0; j < out_width; ++j) {
            alpha[j] = alpha_coeff(pv[j], gv[j], a_n, s_n, m);
            beta[j] = beta_coeff(gv[j], s_n);
        }
        fd_step(std::span(row).first(in_width), alpha, beta, inputs.dM[n], lam, grid.dt,
                std::span(next).first(out_width));
        if (!extended) next[grid.j_nodes] = 0.0;  // pinned spatial boundary
        std::swap(row, next);
        f.boundary[n + 1] = row[0];
        if (keep_field) {
            for (std::size_t j = 0; j < cols; ++j) f.values[(n + 1) * cols + j] = row[j];
            if (!extended) f.pinned[(n + 1) * cols + grid.j_nodes] = 1;
        }
    }
    return f;
}

Field solve(const HSPDEModel& model, const GridSpec& grid, std::uint64_t seed, bool keep_field) {
    validate_grid(grid);
    SolveInputs in = prepare_inputs(model, grid, seed);
    return solve_with(model, grid, in, seed, keep_field);
}

double apply_T_power(std::span<const double> f, std::size_t m, double lambda, std::size_t i) {
    if (f.empty() || i + m > f.size() - 1)
        throw std::invalid_argument("apply_T_power: f not tabulated out to x + m dx");
    if (m == 0) return f[i];
    if (lambda == 1.0) return f[i + m];
    // Binomial weights by the stable ratio recurrence.
    double w = std::pow(1.0 - lambda, static_cast<double>(m));
    double ratio = lambda / (1.0 - lambda);
    double acc = w * f[i];
    for (std::size_t k = 0; k < m; ++k) {
        w *= ratio * static_cast<double>(m - k) / static_cast<double>(k + 1);
        acc += w * f[i + k + 1];
    }
    return acc;
}

double apply_T_iterated(std::span<const double> f, std::size_t m, double lambda, std::size_t i) {
    if (i + m > f.size() - 1)
        throw std::invalid_argument("apply_T_iterated: f not tabulated out to x + m dx");
    std::vector<double> work(f.begin(), f.end());
    std::size_t len = work.size();
    for (std::size_t step = 0; step < m; ++step) {
        for (std::size_t j = 0; j + 1 < len; ++j)
            work[j] = (1.0 - lambda) * work[j] + lambda * work[j + 1];
        --len;
    }
    return work[i];
}

double representation_sum(const HSPDEModel& model, const GridSpec& grid, const SolveInputs& inputs,
                          std::size_t n, std::size_t j) {
    if (n > grid.n_steps || j > grid.j_nodes)
        throw std::invalid_argument("representation_sum: (n, j) outside the grid");
    const std::size_t width = grid.j_nodes + grid.n_steps + 1;
    const double lam = grid.lambda();
    std::vector<double> pv = tabulate_kernel(model.p, grid, width);
    std::vector<double> gv = tabulate_kernel(model.g, grid, width);
    const double m_rate = inputs.drift_rate;

    std::vector<double> y0(width, model.mu);
    double acc = apply_T_power(y0, n, lam, j);
    std::vector<double> tab(width);
    for (std::size_t i = 0; i < n; ++i) {
        const double a_i = inputs.paths.a[i];
        const double s_i = inputs.paths.sigma[i];
        for (std::size_t jj = 0; jj < width; ++jj)
            tab[jj] = alpha_coeff(pv[jj], gv[jj], a_i, s_i, m_rate);
        acc += apply_T_power(tab, n - 1 - i, lam, j) * grid.dt;
        for (std::size_t jj = 0; jj < width; ++jj) tab[jj] = beta_coeff(gv[jj], s_i);
        acc += apply_T_power(tab, n - 1 - i, lam, j) * inputs.dM[i];
    }
    return acc;
}

namespace {

void append_g17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

void write_field_csv(const std::filesystem::path& path, const Field& f) {
    if (f.values.empty()) throw std::invalid_argument("write_field_csv: field values were not kept");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    std::string line = "t";
    for (std::size_t j = 0; j < f.cols; ++j) {
        line += ',';
        append_g17(line, f.grid.x(j));
    }
    line += '\n';
    out << line;
    for (std::size_t n = 0; n <= f.grid.n_steps; ++n) {
        line.clear();
        append_g17(line, f.grid.time(n));
        for (std::size_t j = 0; j < f.cols; ++j) {
            line += ',';
            append_g17(line, f.at(n, j));
        }
        line += '\n';
        out << line;
    }
}

namespace {
constexpr char kFieldMagic[8] = {'H', 'S', 'P', 'D', 'E', 'F', 'L', 'D'};
}

void write_field_bin(const std::filesystem::path& path, const Field& f) {
    if (f.values.empty()) throw std::invalid_argument("write_field_bin: field values were not kept");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    // 32-byte header: magic, N, J, dt, dx; then row-major doubles.
    out.write(kFieldMagic, 8);
    std::uint32_t n = static_cast<std::uint32_t>(f.grid.n_steps);
    std::uint32_t j = static_cast<std::uint32_t>(f.grid.j_nodes);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&j), 4);
    out.write(reinterpret_cast<const char*>(&f.grid.dt), 8);
    out.write(reinterpret_cast<const char*>(&f.grid.dx), 8);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(8 * f.values.size()));
}

Field read_field_bin(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kFieldMagic, 8) != 0)
        throw std::runtime_error("bad field file: " + path.string());
    std::uint32_t n = 0, j = 0;
    Field f;
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&j), 4);
    in.read(reinterpret_cast<char*>(&f.grid.dt), 8);
    in.read(reinterpret_cast<char*>(&f.grid.dx), 8);
    f.grid.n_steps = n;
    f.grid.j_nodes = j;
    f.cols = j + 1;
    f.values.resize(static_cast<std::size_t>(n + 1) * f.cols);
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(8 * f.values.size()));
    if (!in) throw std::runtime_error("truncated field file: " + path.string());
    f.boundary.resize(n + 1);
    for (std::size_t r = 0; r <= n; ++r) f.boundary[r] = f.at(r, 0);
    return f;
}

}  // namespace hspde
