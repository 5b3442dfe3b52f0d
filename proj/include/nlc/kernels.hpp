#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nlc/cutoff.hpp"
#include "nlc/errors.hpp"
#include "nlc/params.hpp"
#include "nlc/quadrature.hpp"

namespace nlc {

namespace detail {

inline double point_norm(const double* x, int n) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
    return std::sqrt(r2);
}

} // namespace detail

// rho(x) = w(|x|) / (gamma(1-s) |x|^{n-1+s}). Integrable singularity at 0;
// callers that integrate across the origin must use cell-averaged rules.
inline double rho_eval(const CutoffProfile& cutoff, const Params& params, const double* x) {
    const double r = detail::point_norm(x, params.n);
    if (r == 0.0) throw SingularityError("rho_eval: singular at x = 0");
    if (r >= cutoff.delta) return 0.0;
    return cutoff(r) / (gamma_const(params.n, 1.0 - params.s) * std::pow(r, params.n - 1 + params.s));
}

// Riesz potential I_s(x) = 1/(gamma(s) |x|^{n-s}), 0 < s < n.
inline double riesz_eval(int n, double s, const double* x) {
    const double r = detail::point_norm(x, n);
    if (r == 0.0) throw SingularityError("riesz_eval: singular at x = 0");
    return 1.0 / (gamma_const(n, s) * std::pow(r, n - s));
}

// Densely sampled radial profile of the compactly supported Riesz-type
// kernel pair (qbar, Q). The inner segment [0, b0*delta] is closed form,
//   qbar(t) = a0 + z0 t^{n-1+s},
// the transition segment is tabulated from the defining radial integral
// and interpolated with a cubic.
class RadialKernelTable {
public:
    Params params;
    CutoffProfile cutoff;
    double z0 = 0.0;
    std::vector<double> radii;        // strictly increasing, spans [b0*delta, delta]
    std::vector<double> qbar_samples; // qbar at those radii

    static RadialKernelTable build(Params params, CutoffProfile cutoff, int samples = 4096,
                                   bool normalize_rho = false) {
        params.validate();
        cutoff.validate();
        if (cutoff.delta != params.delta)
            throw ValidationError("RadialKernelTable: cutoff horizon differs from params.delta");
        if (samples < 16) throw ValidationError("RadialKernelTable: too few samples");

        if (normalize_rho) {
            // Rescale a0 so that the kernel rho has unit mass.
            RadialKernelTable raw = build(params, cutoff, samples, false);
            cutoff.a0 /= raw.rho_mass();
            return build(params, cutoff, samples, false);
        }

        RadialKernelTable table;
        table.params = params;
        table.cutoff = cutoff;

        const int n = params.n;
        const double s = params.s;
        const double kexp = n - 1 + s;
        const double delta = params.delta;
        const double inner = cutoff.b0 * delta;

        // Segment integrals of w(r)/r^{n+s} over a uniform partition of the
        // transition interval, accumulated into the suffix integral
        // J(r_i) = int_{r_i}^{delta} w(r) r^{-(n+s)} dr.
        table.radii.resize(samples + 1);
        std::vector<double> seg(samples);
        const double width = delta - inner;
        for (int i = 0; i <= samples; ++i) table.radii[i] = inner + width * i / samples;
        table.radii.back() = delta;
        for (int i = 0; i < samples; ++i) {
            auto f = [&](double r) { return cutoff(r) / std::pow(r, n + s); };
            seg[i] = integrate(f, table.radii[i], table.radii[i + 1], 1e-13);
        }
        std::vector<double> suffix(samples + 1, 0.0);
        for (int i = samples - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + seg[i];

        table.qbar_samples.resize(samples + 1);
        for (int i = 0; i <= samples; ++i)
            table.qbar_samples[i] = kexp * std::pow(table.radii[i], kexp) * suffix[i];
        table.qbar_samples.back() = 0.0;

        // z0 from the transition integral: on the plateau the defining
        // integral reduces to a0 + z0 t^{n-1+s} with
        // z0 = (n-1+s) J(b0 delta) - a0 (b0 delta)^{-(n-1+s)}.
        table.z0 = kexp * suffix[0] - cutoff.a0 * std::pow(inner, -kexp);
        return table;
    }

    // qbar via the closed inner form and the table; zero beyond the horizon.
    double qbar(double t) const {
        if (t < 0.0) throw ValidationError("qbar: negative radius");
        const double inner = cutoff.b0 * params.delta;
        if (t >= params.delta) return 0.0;
        if (t <= inner) return cutoff.a0 + z0 * std::pow(t, params.n - 1 + params.s);
        return interpolate(t);
    }

    // qbar straight from the defining integral; the plateau part of the
    // integrand is integrated in closed form, the transition adaptively.
    // Slower than qbar() and independent of the table; used as the
    // cross-check branch.
    double qbar_quadrature(double t) const {
        if (t < 0.0) throw ValidationError("qbar_quadrature: negative radius");
        const int n = params.n;
        const double s = params.s;
        const double kexp = n - 1 + s;
        const double delta = params.delta;
        const double inner = cutoff.b0 * delta;
        if (t >= delta) return 0.0;
        if (t == 0.0) return cutoff.a0;
        auto f = [&](double r) { return cutoff(r) / std::pow(r, n + s); };
        double integral = integrate(f, std::max(t, inner), delta, 1e-12);
        if (t < inner)
            integral += cutoff.a0 * (std::pow(t, -kexp) - std::pow(inner, -kexp)) / kexp;
        return kexp * std::pow(t, kexp) * integral;
    }

    // Radial representation of Q: qbar(r) / (gamma(1-s) r^{n-1+s}).
    double Qbar(double r) const {
        if (r == 0.0) throw SingularityError("Qbar: singular at r = 0");
        if (r >= params.delta) return 0.0;
        return qbar(r) /
               (gamma_const(params.n, 1.0 - params.s) * std::pow(r, params.n - 1 + params.s));
    }

    double Q(const double* x) const { return Qbar(detail::point_norm(x, params.n)); }

    // Integral of Q over the centered ball B(0, r); closed form while the
    // ball stays inside the plateau, quadrature beyond.
    double Q_ball_integral(double r) const {
        const int n = params.n;
        const double s = params.s;
        const double gamma1s = gamma_const(n, 1.0 - s);
        const double inner = cutoff.b0 * params.delta;
        const double rcap = std::min(r, params.delta);
        if (rcap <= 0.0) return 0.0;
        const double r0 = std::min(rcap, inner);
        // int_0^{r0} qbar(t) t^{-s} dt with qbar = a0 + z0 t^{n-1+s}.
        double radial = cutoff.a0 * std::pow(r0, 1.0 - s) / (1.0 - s) + z0 * std::pow(r0, n) / n;
        if (rcap > inner) {
            auto f = [&](double t) { return qbar(t) * std::pow(t, -s); };
            radial += integrate(f, inner, rcap, 1e-13);
        }
        return sphere_area(n) / gamma1s * radial;
    }

    // L1 mass of Q over R^n.
    double Q_mass() const { return Q_ball_integral(params.delta); }

    // Mass of rho: sigma_{n-1}/gamma(1-s) * int_0^delta w(r) r^{-s} dr.
    double rho_mass() const {
        const double s = params.s;
        const double inner = cutoff.b0 * params.delta;
        double radial = cutoff.a0 * std::pow(inner, 1.0 - s) / (1.0 - s);
        auto f = [&](double r) { return cutoff(r) * std::pow(r, -s); };
        radial += integrate(f, inner, params.delta, 1e-13);
        return sphere_area(params.n) / gamma_const(params.n, 1.0 - s) * radial;
    }

private:
    // Catmull-Rom interpolation on the transition table.
    double interpolate(double t) const {
        const std::size_t m = radii.size();
        const double lo = radii.front();
        const double step = (radii.back() - lo) / static_cast<double>(m - 1);
        double pos = (t - lo) / step;
        auto i = static_cast<std::ptrdiff_t>(pos);
        if (i < 0) i = 0;
        if (i > static_cast<std::ptrdiff_t>(m) - 2) i = static_cast<std::ptrdiff_t>(m) - 2;
        const double u = pos - static_cast<double>(i);
        auto at = [&](std::ptrdiff_t j) {
            if (j < 0) j = 0;
            if (j > static_cast<std::ptrdiff_t>(m) - 1) j = static_cast<std::ptrdiff_t>(m) - 1;
            return qbar_samples[static_cast<std::size_t>(j)];
        };
        const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
        return p1 + 0.5 * u * (p2 - p0 +
               u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + u * (3.0 * (p1 - p2) + p3 - p0)));
    }
};

// Convenience wrappers with the operation names used by the CLI layer.
inline double qbar_eval(const RadialKernelTable& table, double t) { return table.qbar(t); }

inline double Q_eval(const RadialKernelTable& table, const double* x) { return table.Q(x); }

} // namespace nlc
