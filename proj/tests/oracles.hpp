// Test-only oracles, kept independent of the library code paths they
// cross-check: a Lanczos gamma function, an adaptive Simpson integrator,
// polar-coordinate quadrature for the nonlocal operators, and a dense
// conjugate-gradient solver.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Lanczos approximation (g = 7, 9 coefficients); ~15 digits, independent
// of std::tgamma.
inline double lanczos_gamma(double x) {
    static const double c[9] = {0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059, 12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection
        const double pi = 3.14159265358979323846;
        return pi / (std::sin(pi * x) * lanczos_gamma(1.0 - x));
    }
    x -= 1.0;
    double a = c[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += c[i] / (x + i);
    const double pi = 3.14159265358979323846;
    return std::sqrt(2.0 * pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth > 40 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

} // namespace detail

// Adaptive Simpson integration to absolute tolerance.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-11) {
    if (!(b > a)) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = detail::simpson(a, b, fa, fm, fb);
    return detail::adapt(f, a, b, fa, fm, fb, whole, tol, 0);
}

// Dense symmetric positive definite solve by conjugate gradients.
inline std::vector<double> cg_solve(const std::vector<std::vector<double>>& A,
                                    const std::vector<double>& b, double tol = 1e-14,
                                    int max_iters = 100000) {
    const std::size_t m = b.size();
    std::vector<double> x(m, 0.0), r = b, p = b, Ap(m);
    double rr = 0.0;
    for (double v : r) rr += v * v;
    const double stop = tol * tol * rr;
    for (int it = 0; it < max_iters && rr > stop; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += A[i][j] * p[j];
            Ap[i] = acc;
        }
        double pAp = 0.0;
        for (std::size_t i = 0; i < m; ++i) pAp += p[i] * Ap[i];
        const double alpha = rr / pAp;
        double rr_new = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
            rr_new += r[i] * r[i];
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
    }
    return x;
}

} // namespace oracle
