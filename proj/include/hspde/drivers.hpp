#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hspde {

// Square-integrable Levy driver. With `compensated` set the driver is the
// martingale M(t) = L(t) - mt; otherwise it is the raw process L (needed for
// subordinators, whose increments must stay nonnegative).
class DriverSpec {
public:
    enum class Kind { Brownian, InverseGaussian, CompoundPoisson };

    static DriverSpec brownian(double variance_rate);
    static DriverSpec inverse_gaussian(double delta, double gamma, bool compensated = true);
    // Compound Poisson with intensity rho and jump law matched to the given
    // mean and second moment (gamma-distributed jumps, so the process is a
    // subordinator when left uncompensated).
    static DriverSpec compound_poisson(double rho, double jump_mean, double jump_sq,
                                       bool compensated = true);

    Kind kind() const { return kind_; }
    bool compensated() const { return compensated_; }

    // E[L(1)] of the process as specified (zero when compensated).
    double mean_rate() const;
    // Var[L(1)]; also the angle-bracket rate C1 with <M>(t) = C1 t.
    double variance_rate() const;
    // Mean rate before compensation (subordinator drift).
    double raw_mean_rate() const;

    double brownian_rate() const { return v_; }
    double ig_delta() const { return delta_; }
    double ig_gamma() const { return gamma_; }
    double cp_rho() const { return rho_; }
    double cp_jump_mean() const { return jump_mean_; }
    double cp_jump_sq() const { return jump_sq_; }

    std::string describe() const;

private:
    DriverSpec() = default;

    Kind kind_ = Kind::Brownian;
    bool compensated_ = true;
    double v_ = 1.0;
    double delta_ = 0.0, gamma_ = 0.0;
    double rho_ = 0.0, jump_mean_ = 0.0, jump_sq_ = 0.0;
};

struct IncrementStream {
    double dt = 0.0;
    std::vector<double> values;  // increments of the process over each step
    std::uint64_t seed = 0;      // root seed the stream was derived from
    std::string stream_id;
};

// N i.i.d. increments with the exact marginal law of the process over dt.
// Reproducible given (seed, stream_id, N, dt).
IncrementStream sample_increments(const DriverSpec& d, double dt, std::size_t n,
                                  std::uint64_t root_seed, std::string_view stream_id = "levy");

// Standard normals of the named stream; the Brownian increments of the same
// stream are exactly sqrt(v*dt) times these, so oracles can share the source.
std::vector<double> standard_normals(std::size_t n, std::uint64_t root_seed,
                                     std::string_view stream_id = "levy");

void write_increments_csv(const std::filesystem::path& path, const IncrementStream& s);
IncrementStream read_increments_csv(const std::filesystem::path& path);
void write_increments_bin(const std::filesystem::path& path, const IncrementStream& s);
IncrementStream read_increments_bin(const std::filesystem::path& path);

}  // namespace hspde
