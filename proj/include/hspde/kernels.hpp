#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace hspde {

struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

struct DivergenceError : std::domain_error {
    using std::domain_error::domain_error;
};

// Deterministic stationary kernel g(u), u = t - s + x >= 0. Immutable after
// construction; construction validates parameter ranges.
//
// The optional lattice shift evaluates the base formula at u + shift (used for
// pre-shifted models in the shift-consistency checks). The optional finite
// support zeroes the kernel beyond u = support.
class KernelSpec {
public:
    enum class Kind { Zero, Constant, Exponential, BjerksundBlend, PowerFBm, RegularizedFBm };

    static KernelSpec zero();
    static KernelSpec constant(double c);
    static KernelSpec exponential(double alpha);
    static KernelSpec bjerksund(double a, double b, double alpha);
    static KernelSpec power_fbm(double hurst);
    static KernelSpec regularized_fbm(double hurst, double eps);

    Kind kind() const { return kind_; }
    double hurst() const { return hurst_; }
    double eps() const { return eps_; }
    double shift() const { return shift_; }
    double support() const { return support_; }

    KernelSpec shifted(double delta) const;
    KernelSpec with_support(double support) const;

    // g(u). Throws SingularityError for PowerFBm with H < 1/2 at u = 0.
    double operator()(double u) const;

    // Analytic upper bound on sup |g'| over [0, domain_max]. Throws for
    // PowerFBm (unbounded derivative at the origin unless H = 1/2).
    double lipschitz_constant(double domain_max) const;

    // sup |g| over [0, domain_max], evaluated on a fine lattice plus endpoints.
    double sup_bound(double domain_max) const;

    bool l1_tail_convergent() const;
    bool l2_tail_convergent() const;

    std::string describe() const;

private:
    KernelSpec() = default;

    Kind kind_ = Kind::Zero;
    double level_ = 0.0;   // Constant c / BjerksundBlend a
    double decay_ = 0.0;   // Exponential / BjerksundBlend alpha
    double b_ = 0.0;       // BjerksundBlend b
    double hurst_ = 0.0;   // fBm variants
    double eps_ = 0.0;     // RegularizedFBm
    double shift_ = 0.0;
    double support_ = std::numeric_limits<double>::infinity();
};

struct TailNorms {
    double l1_tail;     // integral_r^inf |p(u)| du
    double l2_tail_sq;  // integral_r^inf g^2(u) du
    double horizon;

    double combined_sq() const { return l1_tail * l1_tail + l2_tail_sq; }
};

// Tail norms of a drift kernel p (L1 sense) and a volatility kernel g (L2
// sense) beyond horizon r, by adaptive quadrature with relative tolerance
// 1e-10. Throws DivergenceError when a required tail does not converge.
TailNorms tail_norms(const KernelSpec& k_drift, const KernelSpec& k_vol, double r);

// Smallest horizon r (up to a bisection resolution of tol * 1e-2 in the norm)
// such that l1_tail^2 + l2_tail_sq <= tol^2.
double truncation_horizon(const KernelSpec& k_drift, const KernelSpec& k_vol, double tol);

struct FbmRegularization {
    double bound;     // (2 + 1/H) eps^{2H}
    double exact_sq;  // ||g - h_eps||^2_{L2(R+)} by quadrature
};

FbmRegularization fbm_regularization_error(double hurst, double eps);

}  // namespace hspde
