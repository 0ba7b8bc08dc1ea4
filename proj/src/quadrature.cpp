#include "hspde/quadrature.hpp"

#include <array>
#include <cmath>

namespace hspde {
namespace {

// 15-point Kronrod abscissae on [-1,1] (positive half) with the embedded
// 7-point Gauss rule at the odd indices. Standard QUADPACK constants.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct RuleResult {
    double kronrod;
    double error;
};

RuleResult gk15(const std::function<double(double)>& f, double a, double b) {
    double center = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    double fc = f(center);
    double result_k = kWgk[7] * fc;
    double result_g = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double dx = half * kXgk[i];
        double fsum = f(center - dx) + f(center + dx);
        result_k += kWgk[i] * fsum;
        if (i % 2 == 1) result_g += kWg[i / 2] * fsum;
    }
    result_k *= half;
    result_g *= half;
    return {result_k, std::abs(result_k - result_g)};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double rel_tol, double abs_tol, int depth) {
    RuleResult r = gk15(f, a, b);
    double tol = std::max(abs_tol, rel_tol * std::abs(r.kronrod));
    if (r.error <= tol || depth <= 0) return r.kronrod;
    double mid = 0.5 * (a + b);
    return adapt(f, a, mid, rel_tol, 0.5 * abs_tol, depth - 1)
         + adapt(f, mid, b, rel_tol, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    return adapt(f, a, b, rel_tol, abs_tol, max_depth);
}

double integrate_tail(const std::function<double(double)>& f, double r,
                      double rel_tol, double abs_tol) {
    auto mapped = [&f, r](double v) {
        double om = 1.0 - v;
        double u = r + v / om;
        return f(u) / (om * om);
    };
    // The Kronrod nodes are interior, so v = 1 is never evaluated.
    return integrate(mapped, 0.0, 1.0, rel_tol, abs_tol);
}

}  // namespace hspde
