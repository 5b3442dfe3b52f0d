#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "nlc/errors.hpp"

namespace nlc {

inline constexpr double kPi = 3.14159265358979323846;

// Surface area of the unit sphere in R^n (2 points for n = 1).
inline double sphere_area(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return 2.0 * kPi;
        case 3: return 4.0 * kPi;
        default: throw ValidationError("sphere_area: unsupported dimension " + std::to_string(n));
    }
}

// gamma(s) = pi^{n/2} 2^s Gamma(s/2) / Gamma((n-s)/2), evaluated with
// tgamma so that negative non-integer arguments (used by the extension
// to negative fractional order) are handled by reflection.
inline double gamma_analytic(int n, double s) {
    return std::pow(kPi, 0.5 * n) * std::pow(2.0, s) * std::tgamma(0.5 * s) /
           std::tgamma(0.5 * (n - s));
}

// Riesz normalization constant; the order must lie in (0, n).
inline double gamma_const(int n, double s) {
    if (!(s > 0.0 && s < n))
        throw ValidationError("gamma_const: order s must lie in (0, n), got s=" + std::to_string(s));
    return gamma_analytic(n, s);
}

// Problem parameters: dimension, fractional order, horizon, integrability.
struct Params {
    int n = 1;
    double s = 0.5;
    double delta = 0.25;
    double p = 2.0;

    void validate() const {
        if (n != 1 && n != 2) throw ValidationError("Params: n must be 1 or 2");
        if (!(s > 0.0 && s < 1.0)) throw ValidationError("Params: s must lie in (0, 1)");
        if (!(delta > 0.0)) throw ValidationError("Params: delta must be positive");
        if (!(p >= 1.0)) throw ValidationError("Params: p must be >= 1");
    }

    // Hoelder conjugate p' = p/(p-1); infinity for p = 1.
    double holder_conjugate() const {
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        return p / (p - 1.0);
    }

    // Sobolev conjugate np/(n - sp); requires sp < n.
    double sobolev_conjugate() const {
        if (!(s * p < n)) throw ValidationError("sobolev_conjugate: requires s*p < n");
        return n * p / (n - s * p);
    }
};

// c_{n,s} = (n - 1 + s)/gamma(1 - s).
inline double cns_const(const Params& params) {
    params.validate();
    return (params.n - 1 + params.s) / gamma_const(params.n, 1.0 - params.s);
}

// The same constant formula continued to order -s; normalizes the
// comparison kernel x/|x|^{n+1-s}. For n = 1 this needs the reflection
// branch of the gamma function.
inline double cns_neg(const Params& params) {
    params.validate();
    return (params.n - 1 - params.s) / gamma_analytic(params.n, 1.0 + params.s);
}

} // namespace nlc
