#pragma once

#include <cmath>

#include "nlc/errors.hpp"

namespace nlc {

// C^infinity monotone step: 0 for t <= 0, 1 for t >= 1, strictly
// increasing in between, with all one-sided derivatives vanishing at
// both junctions.
inline double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

// Radial cut-off profile: plateau a0 on [0, b0*delta], smooth strictly
// decreasing transition on [b0*delta, delta], identically zero beyond.
struct CutoffProfile {
    double a0 = 1.0;
    double b0 = 0.5;
    double delta = 0.25;

    void validate() const {
        if (!(a0 > 0.0)) throw ValidationError("CutoffProfile: a0 must be positive");
        if (!(b0 > 0.0 && b0 < 1.0)) throw ValidationError("CutoffProfile: b0 must lie in (0, 1)");
        if (!(delta > 0.0)) throw ValidationError("CutoffProfile: delta must be positive");
    }

    double operator()(double r) const {
        if (r >= delta) return 0.0;
        const double inner = b0 * delta;
        if (r <= inner) return a0;
        return a0 * (1.0 - smooth_step((r - inner) / (delta - inner)));
    }
};

// Evaluates the profile at a point of R^n (radial).
inline double cutoff_eval(const CutoffProfile& cutoff, double r) {
    if (r < 0.0) throw ValidationError("cutoff_eval: radius must be nonnegative");
    return cutoff(r);
}

} // namespace nlc
