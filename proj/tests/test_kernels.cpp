#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlc/cutoff.hpp"
#include "nlc/kernels.hpp"
#include "nlc/params.hpp"
#include "nlc/util.hpp"
#include "oracles.hpp"

using namespace nlc;

namespace {

RadialKernelTable default_table(int n = 1, double s = 0.5, double delta = 0.25, double a0 = 1.0,
                                double b0 = 0.5) {
    Params p;
    p.n = n;
    p.s = s;
    p.delta = delta;
    CutoffProfile c;
    c.a0 = a0;
    c.b0 = b0;
    c.delta = delta;
    return RadialKernelTable::build(p, c);
}

double oracle_gamma_const(int n, double s) {
    const double pi = 3.14159265358979323846;
    return std::pow(pi, 0.5 * n) * std::pow(2.0, s) * oracle::lanczos_gamma(0.5 * s) /
           oracle::lanczos_gamma(0.5 * (n - s));
}

} // namespace

TEST_CASE("gamma_const closed values and oracle cross-check") {
    // n=1, s=1/2: the two Gamma factors cancel, leaving sqrt(2 pi)
    CHECK(gamma_const(1, 0.5) == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-13));
    // n=2, s=1: Gamma(1/2) cancels, leaving 2 pi
    CHECK(gamma_const(2, 1.0) == doctest::Approx(2.0 * kPi).epsilon(1e-13));
    // n=2, s=1/2 against the independent Lanczos evaluation
    CHECK(gamma_const(2, 0.5) == doctest::Approx(oracle_gamma_const(2, 0.5)).epsilon(1e-12));

    CHECK_THROWS_AS(gamma_const(1, 1.5), ValidationError);
    CHECK_THROWS_AS(gamma_const(2, -0.1), ValidationError);

    // positivity across the admissible range
    for (double s = 0.05; s < 1.0; s += 0.05) {
        CHECK(gamma_const(1, s) > 0.0);
        CHECK(gamma_const(2, s) > 0.0);
        CHECK(gamma_const(2, 1.0 + s) > 0.0);
    }
}

TEST_CASE("cns_const values") {
    Params p;
    p.n = 1;
    p.s = 0.5;
    CHECK(cns_const(p) == doctest::Approx(0.5 / std::sqrt(2.0 * kPi)).epsilon(1e-13));

    p.s = 0.9;
    CHECK(cns_const(p) == doctest::Approx(0.9 / oracle_gamma_const(1, 0.1)).epsilon(1e-12));

    // n=2, s -> 1: the constant stays finite and vanishes linearly in
    // (1-s); the rescaled series c/(1-s) settles to a limit.
    p.n = 2;
    double prev_scaled = 0.0;
    for (double s : {0.99, 0.995, 0.999}) {
        p.s = s;
        const double v = cns_const(p);
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
        const double scaled = v / (1.0 - s);
        if (prev_scaled != 0.0) CHECK(std::abs(scaled - prev_scaled) < 0.02 * prev_scaled);
        prev_scaled = scaled;
    }
}

TEST_CASE("cutoff profile plateau, decay and smooth junctions") {
    CutoffProfile c;
    c.a0 = 1.5;
    c.b0 = 0.4;
    c.delta = 0.3;

    CHECK(cutoff_eval(c, 0.0) == 1.5);
    CHECK(cutoff_eval(c, 0.4 * 0.3) == 1.5);
    CHECK(cutoff_eval(c, 0.3) == 0.0);
    CHECK(cutoff_eval(c, 0.5) == 0.0);

    const double mid = 0.5 * (c.b0 * c.delta + c.delta);
    const double v = cutoff_eval(c, mid);
    CHECK(v > 0.0);
    CHECK(v < c.a0);

    // monotone decrease across the transition; strict away from the
    // junctions (the profile is machine-flat right next to them)
    double prev = c.a0;
    for (int i = 1; i <= 50; ++i) {
        double t = static_cast<double>(i) / 51.0;
        double r = c.b0 * c.delta + (c.delta - c.b0 * c.delta) * t;
        double w = cutoff_eval(c, r);
        CHECK(w <= prev);
        if (t > 0.15 && t < 0.85) CHECK(w < prev);
        prev = w;
    }
}

TEST_CASE("rho support, rotation invariance and shell integral oracle") {
    Params p;
    p.n = 2;
    p.s = 0.5;
    p.delta = 0.25;
    CutoffProfile c;
    c.delta = p.delta;

    double x[2] = {0.3, 0.0};
    CHECK(rho_eval(c, p, x) == 0.0);

    // radial: same value for any direction of equal radius
    double x1[2] = {0.1, 0.05};
    const double r = std::sqrt(0.1 * 0.1 + 0.05 * 0.05);
    double x2[2] = {r, 0.0};
    double x3[2] = {0.0, r};
    CHECK(rho_eval(c, p, x1) == doctest::Approx(rho_eval(c, p, x2)).epsilon(1e-13));
    CHECK(rho_eval(c, p, x1) == doctest::Approx(rho_eval(c, p, x3)).epsilon(1e-13));

    double x0[2] = {0.0, 0.0};
    CHECK_THROWS_AS(rho_eval(c, p, x0), SingularityError);

    // shell integral over delta/4 <= |x| <= delta/2 against adaptive Simpson
    const double expected =
        2.0 * kPi *
        oracle::integrate(
            [&](double rr) {
                double pt[2] = {rr, 0.0};
                return rho_eval(c, p, pt) * rr;
            },
            p.delta / 4.0, p.delta / 2.0, 1e-12);
    // midpoint-in-radius Riemann sum of the exact radial profile
    double sum = 0.0;
    const int m = 20000;
    const double lo = p.delta / 4.0, hi = p.delta / 2.0, dr = (hi - lo) / m;
    for (int i = 0; i < m; ++i) {
        double rr = lo + (i + 0.5) * dr;
        double pt[2] = {rr, 0.0};
        sum += rho_eval(c, p, pt) * rr * dr;
    }
    sum *= 2.0 * kPi;
    CHECK(sum == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("qbar closed form vs quadrature branch") {
    for (int n : {1, 2}) {
        auto table = default_table(n, 0.5);
        const double inner = table.cutoff.b0 * table.params.delta;

        CHECK(table.qbar(table.params.delta) == 0.0);
        CHECK(table.qbar(2.0) == 0.0);
        CHECK(table.qbar(0.0) == doctest::Approx(table.cutoff.a0).epsilon(1e-13));
        CHECK(table.qbar_quadrature(0.0) == table.cutoff.a0);

        // branch agreement at the junction
        CHECK(table.qbar(inner) == doctest::Approx(table.qbar_quadrature(inner)).epsilon(1e-10));

        // closed form against the quadrature branch on the plateau
        Rng rng(7u + static_cast<unsigned>(n));
        const double kexp = n - 1 + table.params.s;
        for (int i = 0; i < 100; ++i) {
            const double t = rng.uniform(0.0, inner);
            const double closed = table.cutoff.a0 + table.z0 * std::pow(t, kexp);
            CHECK(std::abs(table.qbar_quadrature(t) - closed) <= 1e-8 * table.cutoff.a0);
        }
    }
}

TEST_CASE("qbar table interpolation matches quadrature on the transition") {
    auto table = default_table(1, 0.7);
    Rng rng(11);
    const double inner = table.cutoff.b0 * table.params.delta;
    for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform(inner, table.params.delta);
        CHECK(table.qbar(t) == doctest::Approx(table.qbar_quadrature(t)).epsilon(1e-9));
    }
}

TEST_CASE("Q support, monotone decrease, gradient identity and L1 mass") {
    for (int n : {1, 2}) {
        auto table = default_table(n, 0.5);
        const Params& p = table.params;

        double far[2] = {p.delta, 0.0};
        CHECK(table.Q(far) == 0.0);

        // radially decreasing along a ray
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 60; ++i) {
            const double r = p.delta * i / 61.0;
            const double v = table.Qbar(r);
            CHECK(v <= prev);
            prev = v;
        }

        // -grad Q/(n-1+s) = rho(x) x/|x|^2 by central differences
        Rng rng(23u + static_cast<unsigned>(n));
        const double step = 2.5e-6 * p.delta;
        for (int trial = 0; trial < 50; ++trial) {
            const double r = rng.uniform(0.1 * p.delta, 0.9 * p.delta);
            double x[2] = {r, 0.0};
            if (n == 2) {
                const double th = rng.uniform(0.0, 2.0 * kPi);
                x[0] = r * std::cos(th);
                x[1] = r * std::sin(th);
            }
            const double rho = rho_eval(table.cutoff, p, x);
            for (int a = 0; a < n; ++a) {
                double xp[2] = {x[0], x[1]}, xm[2] = {x[0], x[1]};
                xp[a] += step;
                xm[a] -= step;
                const double fd = (table.Q(xp) - table.Q(xm)) / (2.0 * step);
                const double expected = -(n - 1 + p.s) * rho * x[a] / (r * r);
                if (std::abs(expected) > 1e-12)
                    CHECK(fd == doctest::Approx(expected).epsilon(1e-4));
            }
        }

        // L1 mass against an independent dense quadrature built on the
        // defining-integral branch of qbar: the singular inner segment in
        // closed form (validated pointwise above), adaptive Simpson on the
        // smooth transition.
        const double sigma = sphere_area(n);
        const double gamma1s = gamma_const(n, 1.0 - p.s);
        const double inner_r = table.cutoff.b0 * p.delta;
        double mass = table.cutoff.a0 * std::pow(inner_r, 1.0 - p.s) / (1.0 - p.s) +
                      table.z0 * std::pow(inner_r, n) / n;
        mass += oracle::integrate(
            [&](double r) { return table.qbar_quadrature(r) * std::pow(r, -p.s); }, inner_r,
            p.delta, 1e-10);
        mass *= sigma / gamma1s;
        CHECK(table.Q_mass() == doctest::Approx(mass).epsilon(1e-6));
        CHECK(std::isfinite(table.Q_mass()));
    }
}

TEST_CASE("riesz potential: homogeneity, symmetry, value") {
    // n=1, s=1/2, |x|=1 -> 1/sqrt(2 pi)
    double one[1] = {1.0};
    CHECK(riesz_eval(1, 0.5, one) == doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-13));

    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const double s = rng.uniform(0.1, 0.9);
        double x[2] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        double mx[2] = {-x[0], -x[1]};
        CHECK(riesz_eval(2, s, x) == doctest::Approx(riesz_eval(2, s, mx)).epsilon(1e-13));
        const double lam = rng.uniform(0.5, 2.0);
        double lx[2] = {lam * x[0], lam * x[1]};
        CHECK(riesz_eval(2, s, lx) ==
              doctest::Approx(std::pow(lam, s - 2) * riesz_eval(2, s, x)).epsilon(1e-12));
    }
}

TEST_CASE("normalize_rho flag rescales the plateau to unit kernel mass") {
    Params p;
    p.n = 1;
    p.s = 0.5;
    p.delta = 0.25;
    CutoffProfile c;
    c.delta = p.delta;
    auto raw = RadialKernelTable::build(p, c);
    CHECK(raw.rho_mass() != doctest::Approx(1.0));
    auto normalized = RadialKernelTable::build(p, c, 4096, /*normalize_rho=*/true);
    CHECK(normalized.rho_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("params validation and derived exponents") {
    Params p;
    p.n = 3;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.n = 1;
    p.s = 1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.s = 0.5;
    p.delta = -1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.delta = 0.25;
    p.p = 0.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);

    p.p = 2.0;
    p.validate();
    CHECK(p.holder_conjugate() == doctest::Approx(2.0));
    p.n = 2;
    CHECK(p.sobolev_conjugate() == doctest::Approx(2.0 * 2.0 / (2.0 - 1.0)));
}
