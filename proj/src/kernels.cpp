#include "hspde/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hspde/quadrature.hpp"

namespace hspde {

KernelSpec KernelSpec::zero() { return KernelSpec{}; }

KernelSpec KernelSpec::constant(double c) {
    KernelSpec k;
    k.kind_ = Kind::Constant;
    k.level_ = c;
    return k;
}

KernelSpec KernelSpec::exponential(double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("Exponential kernel: alpha must be >= 0");
    KernelSpec k;
    k.kind_ = Kind::Exponential;
    k.decay_ = alpha;
    return k;
}

KernelSpec KernelSpec::bjerksund(double a, double b, double alpha) {
    if (!(a > 0.0)) throw std::invalid_argument("BjerksundBlend kernel: a must be > 0");
    if (!(b > 0.0)) throw std::invalid_argument("BjerksundBlend kernel: b must be > 0");
    if (!(alpha >= 0.0)) throw std::invalid_argument("BjerksundBlend kernel: alpha must be >= 0");
    KernelSpec k;
    k.kind_ = Kind::BjerksundBlend;
    k.level_ = a;
    k.b_ = b;
    k.decay_ = alpha;
    return k;
}

KernelSpec KernelSpec::power_fbm(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("PowerFBm kernel: H must be in (0,1)");
    KernelSpec k;
    k.kind_ = Kind::PowerFBm;
    k.hurst_ = hurst;
    return k;
}

KernelSpec KernelSpec::regularized_fbm(double hurst, double eps) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("RegularizedFBm kernel: H must be in (0,1)");
    if (!(eps > 0.0)) throw std::invalid_argument("RegularizedFBm kernel: eps must be > 0");
    KernelSpec k;
    k.kind_ = Kind::RegularizedFBm;
    k.hurst_ = hurst;
    k.eps_ = eps;
    return k;
}

KernelSpec KernelSpec::shifted(double delta) const {
    if (!(delta >= 0.0)) throw std::invalid_argument("kernel shift must be >= 0");
    KernelSpec k = *this;
    k.shift_ = shift_ + delta;
    return k;
}

KernelSpec KernelSpec::with_support(double support) const {
    if (!(support > 0.0)) throw std::invalid_argument("kernel support must be > 0");
    KernelSpec k = *this;
    k.support_ = support;
    return k;
}

double KernelSpec::operator()(double u) const {
    if (!(u >= 0.0)) throw std::invalid_argument("kernel argument must be >= 0");
    double ue = u + shift_;
    if (ue >= support_) return 0.0;
    switch (kind_) {
        case Kind::Zero:
            return 0.0;
        case Kind::Constant:
            return level_;
        case Kind::Exponential:
            return std::exp(-decay_ * ue);
        case Kind::BjerksundBlend:
            return level_ * std::exp(-decay_ * ue) / (ue + b_);
        case Kind::PowerFBm:
            if (ue == 0.0) {
                if (hurst_ < 0.5)
                    throw SingularityError("PowerFBm kernel diverges at u = 0 for H < 1/2; use RegularizedFBm");
                return hurst_ == 0.5 ? 1.0 : 0.0;
            }
            return std::pow(ue, hurst_ - 0.5);
        case Kind::RegularizedFBm:
            return std::pow(ue <= eps_ ? eps_ : ue, hurst_ - 0.5);
    }
    return 0.0;
}

double KernelSpec::lipschitz_constant(double domain_max) const {
    switch (kind_) {
        case Kind::Zero:
        case Kind::Constant:
            return 0.0;
        case Kind::Exponential:
            return decay_;
        case Kind::BjerksundBlend: {
            // |g'(u)| = a e^{-alpha u} (alpha/(u+b) + 1/(u+b)^2), scanned on a
            // fine lattice (the expression is monotone for the paper's
            // parameters but not in general).
            const int n = 4096;
            double best = 0.0;
            for (int i = 0; i <= n; ++i) {
                double u = shift_ + domain_max * static_cast<double>(i) / n;
                double d = level_ * std::exp(-decay_ * u)
                         * (decay_ / (u + b_) + 1.0 / ((u + b_) * (u + b_)));
                best = std::max(best, d);
            }
            return best;
        }
        case Kind::PowerFBm:
            if (hurst_ == 0.5) return 0.0;
            throw SingularityError("PowerFBm kernel has unbounded derivative near u = 0; use RegularizedFBm");
        case Kind::RegularizedFBm:
            (void)domain_max;
            return std::abs(hurst_ - 0.5) * std::pow(eps_, hurst_ - 1.5);
    }
    return 0.0;
}

double KernelSpec::sup_bound(double domain_max) const {
    const int n = 4096;
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
        double u = domain_max * static_cast<double>(i) / n;
        if (kind_ == Kind::PowerFBm && u + shift_ == 0.0 && hurst_ < 0.5) continue;
        best = std::max(best, std::abs((*this)(u)));
    }
    return best;
}

bool KernelSpec::l1_tail_convergent() const {
    if (support_ < std::numeric_limits<double>::infinity()) return true;
    switch (kind_) {
        case Kind::Zero: return true;
        case Kind::Constant: return level_ == 0.0;
        case Kind::Exponential: return decay_ > 0.0;
        case Kind::BjerksundBlend: return decay_ > 0.0;
        case Kind::PowerFBm:
        case Kind::RegularizedFBm: return false;
    }
    return false;
}

bool KernelSpec::l2_tail_convergent() const {
    if (support_ < std::numeric_limits<double>::infinity()) return true;
    switch (kind_) {
        case Kind::Zero: return true;
        case Kind::Constant: return level_ == 0.0;
        case Kind::Exponential: return decay_ > 0.0;
        case Kind::BjerksundBlend: return true;  // O(1/u^2) decay even at alpha = 0
        case Kind::PowerFBm:
        case Kind::RegularizedFBm: return false;
    }
    return false;
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Zero: os << "zero"; break;
        case Kind::Constant: os << "constant(c=" << level_ << ")"; break;
        case Kind::Exponential: os << "exponential(alpha=" << decay_ << ")"; break;
        case Kind::BjerksundBlend:
            os << "bjerksund(a=" << level_ << ",b=" << b_ << ",alpha=" << decay_ << ")";
            break;
        case Kind::PowerFBm: os << "power_fbm(H=" << hurst_ << ")"; break;
        case Kind::RegularizedFBm: os << "regularized_fbm(H=" << hurst_ << ",eps=" << eps_ << ")"; break;
    }
    if (shift_ != 0.0) os << "+shift(" << shift_ << ")";
    if (support_ < std::numeric_limits<double>::infinity()) os << "|support(" << support_ << ")";
    return os.str();
}

TailNorms tail_norms(const KernelSpec& k_drift, const KernelSpec& k_vol, double r) {
    if (!std::isfinite(r)) throw std::invalid_argument("tail_norms: horizon must be finite");
    if (!k_drift.l1_tail_convergent())
        throw DivergenceError("tail_norms: L1 tail of drift kernel " + k_drift.describe() + " diverges");
    if (!k_vol.l2_tail_convergent())
        throw DivergenceError("tail_norms: L2 tail of volatility kernel " + k_vol.describe() + " diverges");
    double r0 = std::max(r, 0.0);
    double l1 = 0.0;
    if (k_drift.kind() != KernelSpec::Kind::Zero)
        l1 = integrate_tail([&k_drift](double u) { return std::abs(k_drift(u)); }, r0);
    double l2 = 0.0;
    if (k_vol.kind() != KernelSpec::Kind::Zero)
        l2 = integrate_tail([&k_vol](double u) { double g = k_vol(u); return g * g; }, r0);
    return {l1, l2, r};
}

double truncation_horizon(const KernelSpec& k_drift, const KernelSpec& k_vol, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("truncation_horizon: tol must be > 0");
    double target = tol * tol;
    auto combined = [&](double r) { return tail_norms(k_drift, k_vol, r).combined_sq(); };
    if (combined(0.0) <= target) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (combined(hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e18) throw DivergenceError("truncation_horizon: no finite horizon reaches the tolerance");
    }
    // Bisect until the norm gap at the bracket is below tol * 1e-2.
    double resolution = tol * 1e-2;
    for (int it = 0; it < 200; ++it) {
        if (std::sqrt(combined(lo)) - tol <= resolution) break;
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
        double mid = 0.5 * (lo + hi);
        if (combined(mid) <= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

FbmRegularization fbm_regularization_error(double hurst, double eps) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("fbm_regularization_error: H must be in (0,1)");
    if (!(eps > 0.0)) throw std::invalid_argument("fbm_regularization_error: eps must be > 0");
    double bound = (2.0 + 1.0 / hurst) * std::pow(eps, 2.0 * hurst);
    // g and h_eps agree beyond eps, so the L2 distance lives on [0, eps].
    double ge = std::pow(eps, hurst - 0.5);
    double exact = integrate(
        [hurst, ge](double u) {
            double d = std::pow(u, hurst - 0.5) - ge;
            return d * d;
        },
        0.0, eps, 1e-10, 1e-16 * std::max(bound, 1e-300));
    return {bound, exact};
}

}  // namespace hspde
