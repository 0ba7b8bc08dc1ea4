#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace hspde {

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Root seed -> named stream -> optional per-path index. All simulation code
// derives its generator seeds through this single function so that runs with
// a common root seed share increments (common random numbers).
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                                    std::uint64_t index = 0) {
    return splitmix64(splitmix64(root ^ fnv1a64(stream)) + index);
}

// Deterministic sampler on top of mt19937_64. The distribution transforms are
// implemented here (not via std::*_distribution) so that streams are
// bit-reproducible for a given seed regardless of the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on (0,1], never returns 0.
    double uniform() {
        double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    // Box-Muller, one normal per call (spare discarded so that the i-th
    // normal of a stream is a fixed function of the i-th generator state).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Inverse Gaussian with mean mu and shape lam (Michael-Schucany-Haas).
    double inverse_gaussian(double mu, double lam) {
        double v = normal();
        double y = v * v;
        double x = mu + mu * mu * y / (2.0 * lam)
                 - mu / (2.0 * lam) * std::sqrt(4.0 * mu * lam * y + mu * mu * y * y);
        if (!(x > 0.0)) x = mu * 1e-12;  // guard rounding at tiny shapes
        double u = uniform();
        return (u <= mu / (mu + x)) ? x : mu * mu / x;
    }

    // Marsaglia-Tsang; exact for all k > 0.
    double gamma(double k, double theta) {
        if (!(k > 0.0) || !(theta > 0.0))
            throw std::invalid_argument("gamma: shape and scale must be positive");
        if (k < 1.0) {
            double u = uniform();
            return gamma(k + 1.0, theta) * std::pow(u, 1.0 / k);
        }
        double d = k - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            double v = t * t * t;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * theta;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * theta;
        }
    }

    // Exact Poisson count via the multiplication method; large means are
    // split so the product never underflows.
    std::uint64_t poisson(double mean) {
        if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
        if (mean == 0.0) return 0;
        if (mean > 50.0) {
            std::uint64_t half = poisson(mean / 2.0);
            return half + poisson(mean - mean / 2.0);
        }
        double limit = std::exp(-mean);
        double prod = uniform();
        std::uint64_t n = 0;
        while (prod > limit) {
            prod *= uniform();
            ++n;
        }
        return n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace hspde
