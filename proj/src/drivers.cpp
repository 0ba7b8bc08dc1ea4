#include "hspde/drivers.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hspde/rng.hpp"

namespace hspde {

DriverSpec DriverSpec::brownian(double variance_rate) {
    if (!(variance_rate > 0.0)) throw std::invalid_argument("Brownian driver: variance rate must be > 0");
    DriverSpec d;
    d.kind_ = Kind::Brownian;
    d.v_ = variance_rate;
    return d;
}

DriverSpec DriverSpec::inverse_gaussian(double delta, double gamma, bool compensated) {
    if (!(delta > 0.0)) throw std::invalid_argument("IG driver: delta must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("IG driver: gamma must be > 0");
    DriverSpec d;
    d.kind_ = Kind::InverseGaussian;
    d.compensated_ = compensated;
    d.delta_ = delta;
    d.gamma_ = gamma;
    return d;
}

DriverSpec DriverSpec::compound_poisson(double rho, double jump_mean, double jump_sq,
                                        bool compensated) {
    if (!(rho >= 0.0)) throw std::invalid_argument("compound Poisson driver: rho must be >= 0");
    if (rho > 0.0) {
        if (!(jump_mean > 0.0))
            throw std::invalid_argument("compound Poisson driver: jump mean must be > 0");
        if (!(jump_sq >= jump_mean * jump_mean))
            throw std::invalid_argument("compound Poisson driver: jump second moment below jump_mean^2");
    }
    DriverSpec d;
    d.kind_ = Kind::CompoundPoisson;
    d.compensated_ = compensated;
    d.rho_ = rho;
    d.jump_mean_ = jump_mean;
    d.jump_sq_ = jump_sq;
    return d;
}

double DriverSpec::raw_mean_rate() const {
    switch (kind_) {
        case Kind::Brownian: return 0.0;
        case Kind::InverseGaussian: return delta_ / gamma_;
        case Kind::CompoundPoisson: return rho_ * jump_mean_;
    }
    return 0.0;
}

double DriverSpec::mean_rate() const { return compensated_ ? 0.0 : raw_mean_rate(); }

double DriverSpec::variance_rate() const {
    switch (kind_) {
        case Kind::Brownian: return v_;
        case Kind::InverseGaussian: return delta_ / (gamma_ * gamma_ * gamma_);
        case Kind::CompoundPoisson: return rho_ * jump_sq_;
    }
    return 0.0;
}

std::string DriverSpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Brownian: os << "brownian(v=" << v_ << ")"; break;
        case Kind::InverseGaussian:
            os << (compensated_ ? "compensated_ig" : "ig") << "(delta=" << delta_
               << ",gamma=" << gamma_ << ")";
            break;
        case Kind::CompoundPoisson:
            os << (compensated_ ? "compensated_cpoisson" : "cpoisson") << "(rho=" << rho_
               << ",jump_mean=" << jump_mean_ << ",jump_sq=" << jump_sq_ << ")";
            break;
    }
    return os.str();
}

std::vector<double> standard_normals(std::size_t n, std::uint64_t root_seed,
                                     std::string_view stream_id) {
    Rng rng(derive_seed(root_seed, stream_id));
    std::vector<double> z(n);
    for (auto& v : z) v = rng.normal();
    return z;
}

IncrementStream sample_increments(const DriverSpec& d, double dt, std::size_t n,
                                  std::uint64_t root_seed, std::string_view stream_id) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increments: dt must be > 0");
    if (n < 1) throw std::invalid_argument("sample_increments: N must be >= 1");
    IncrementStream s;
    s.dt = dt;
    s.seed = root_seed;
    s.stream_id = std::string(stream_id);
    s.values.resize(n);
    Rng rng(derive_seed(root_seed, stream_id));
    switch (d.kind()) {
        case DriverSpec::Kind::Brownian: {
            double sd = std::sqrt(d.brownian_rate() * dt);
            for (auto& v : s.values) v = sd * rng.normal();
            break;
        }
        case DriverSpec::Kind::InverseGaussian: {
            double mu = d.ig_delta() * dt / d.ig_gamma();
            double lam = d.ig_delta() * dt * d.ig_delta() * dt;
            double comp = d.compensated() ? mu : 0.0;
            for (auto& v : s.values) v = rng.inverse_gaussian(mu, lam) - comp;
            break;
        }
        case DriverSpec::Kind::CompoundPoisson: {
            double m = d.cp_jump_mean();
            double var = d.cp_jump_sq() - m * m;
            double comp = d.compensated() ? d.cp_rho() * dt * m : 0.0;
            for (auto& v : s.values) {
                std::uint64_t count = rng.poisson(d.cp_rho() * dt);
                double sum = 0.0;
                if (var > 0.0) {
                    double theta = var / m;
                    double k = m / theta;
                    for (std::uint64_t i = 0; i < count; ++i) sum += rng.gamma(k, theta);
                } else {
                    sum = static_cast<double>(count) * m;
                }
                v = sum - comp;
            }
            break;
        }
    }
    return s;
}

void write_increments_csv(const std::filesystem::path& path, const IncrementStream& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out.precision(17);
    out << "# dt=" << s.dt << " seed=" << s.seed << " stream=" << s.stream_id << "\n";
    for (double v : s.values) out << v << "\n";
}

IncrementStream read_increments_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    IncrementStream s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tok;
            while (hs >> tok) {
                auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "dt") s.dt = std::stod(val);
                else if (key == "seed") s.seed = std::stoull(val);
                else if (key == "stream") s.stream_id = val;
            }
            continue;
        }
        s.values.push_back(std::stod(line));
    }
    return s;
}

namespace {
constexpr char kIncMagic[8] = {'H', 'S', 'P', 'D', 'E', 'I', 'N', 'C'};
}

void write_increments_bin(const std::filesystem::path& path, const IncrementStream& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out.write(kIncMagic, 8);
    std::uint64_t n = s.values.size();
    out.write(reinterpret_cast<const char*>(&s.dt), 8);
    out.write(reinterpret_cast<const char*>(&s.seed), 8);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(s.values.data()), static_cast<std::streamsize>(8 * n));
}

IncrementStream read_increments_bin(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kIncMagic, 8) != 0)
        throw std::runtime_error("bad increment stream file: " + path.string());
    IncrementStream s;
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&s.dt), 8);
    in.read(reinterpret_cast<char*>(&s.seed), 8);
    in.read(reinterpret_cast<char*>(&n), 8);
    s.values.resize(n);
    in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(8 * n));
    if (!in) throw std::runtime_error("truncated increment stream file: " + path.string());
    return s;
}

}  // namespace hspde
