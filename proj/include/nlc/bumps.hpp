#pragma once

#include <cmath>

#include "nlc/cutoff.hpp"

namespace nlc {

// Compactly supported smooth test profiles, as functions of |x - c|.

// C^infinity bump: exp(1 - 1/(1 - t^2)) on t = r/R < 1, zero beyond.
inline double bump_smooth(double r, double R) {
    const double t = r / R;
    if (t >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

// Gaussian with a smooth plateau taper that reaches exactly zero at R.
inline double bump_gauss(double r, double width, double R) {
    if (r >= R) return 0.0;
    const double taper = 1.0 - smooth_step((r - 0.6 * R) / (0.4 * R));
    return std::exp(-(r * r) / (width * width)) * taper;
}

// C^3 polynomial bump (1 - (r/R)^2)^4.
inline double bump_poly(double r, double R) {
    const double t = r / R;
    if (t >= 1.0) return 0.0;
    const double q = 1.0 - t * t;
    const double q2 = q * q;
    return q2 * q2;
}

} // namespace nlc
