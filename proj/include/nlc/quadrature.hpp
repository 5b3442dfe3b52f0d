#pragma once

#include <cmath>
#include <cstddef>

#include "nlc/errors.hpp"

namespace nlc {

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - r * kKronrodNodes[i]);
        fv[14 - i] = f(c + r * kKronrodNodes[i]);
    }
    fv[7] = f(c);
    double kron = kKronrodWeights[7] * fv[7];
    double gauss = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kron += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (fv[i] + fv[14 - i]);
    }
    value = kron * r;
    error = std::abs((kron - gauss) * r);
}

template <class F>
inline double adapt(const F& f, double a, double b, double abstol, int depth) {
    double v, e;
    gk15(f, a, b, v, e);
    // the relative floor keeps requests below roundoff from recursing forever
    if (e <= abstol || e <= 1e-15 * std::abs(v) || depth >= 30 ||
        b - a < 1e-14 * (std::abs(a) + std::abs(b)))
        return v;
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * abstol, depth + 1) + adapt(f, c, b, 0.5 * abstol, depth + 1);
}

} // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b] to absolute
// tolerance abstol. The integrand must be finite on the open interval;
// endpoint singularities are the caller's business (substitute first).
template <class F>
inline double integrate(const F& f, double a, double b, double abstol = 1e-10) {
    if (!(b > a)) return 0.0;
    return detail::adapt(f, a, b, abstol, 0);
}

// Integrates f(r) r^{-sigma} over [0, b] with 0 <= sigma < 1, using the
// substitution r = u^{1/(1-sigma)} that removes the endpoint singularity.
template <class F>
inline double integrate_power_endpoint(const F& f, double sigma, double b, double abstol = 1e-10) {
    if (!(b > 0.0)) return 0.0;
    const double q = 1.0 - sigma;
    const double ub = std::pow(b, q);
    auto g = [&](double u) {
        double r = std::pow(u, 1.0 / q);
        return f(r) / q;
    };
    return integrate(g, 0.0, ub, abstol);
}

} // namespace nlc
