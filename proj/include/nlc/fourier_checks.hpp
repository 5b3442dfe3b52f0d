#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nlc/cutoff.hpp"
#include "nlc/errors.hpp"
#include "nlc/params.hpp"
#include "nlc/quadrature.hpp"
#include "nlc/spectral.hpp"

namespace nlc {

// Which vector Riesz-type transform pair to exercise.
enum class RieszOracleMode {
    vector_riesz_n, // n >= 2, 0 < alpha < n-1:  (n-a-1)/gamma(1+a) x/|x|^{n-a+1}  ->  -i xi/|xi| |2 pi xi|^{-a}
    vector_riesz_1, // n = 1, 0 < s < 1:         c_{1,-s} x/|x|^{2-s}              ->  -i xi/|xi| |2 pi xi|^{-s}
    inverse_length, // any n:                    x/(sigma_{n-1}|x|^n)              ->  -i xi/|xi| / |2 pi xi|
};

struct FourierOracleReport {
    RieszOracleMode mode;
    double alpha = 0.0;
    double band_lo = 0.0, band_hi = 0.0; // shell radii compared
    double max_rel_err = 0.0;
    std::size_t shells = 0;
};

// Samples the kernel (with smooth radial taper against the box boundary
// and odd-kernel zero at the origin cell), transforms it, and compares
// shell-averaged magnitudes against the analytic transform on a mid-band
// [Nyquist/32, Nyquist/16]. Low shells are distorted by the taper, high
// shells by sampling bias of the singularity; the mid band is clean.
// Band: shell radii in [Nyquist/32, Nyquist/16].
inline FourierOracleReport fourier_oracle_riesz(int n, double alpha_or_s, RieszOracleMode mode,
                                                const GridSpec& grid) {
    grid.validate();
    if (std::abs(grid.lo + grid.hi) > 1e-12 * grid.length())
        throw ValidationError("fourier_oracle_riesz: grid must be symmetric about the origin");
    double coeff = 0.0;
    double alpha = alpha_or_s;
    switch (mode) {
        case RieszOracleMode::vector_riesz_n:
            if (n < 2 || !(alpha > 0.0 && alpha < n - 1))
                throw ValidationError("fourier_oracle_riesz: need n >= 2 and 0 < alpha < n-1");
            coeff = (n - alpha - 1) / gamma_analytic(n, 1.0 + alpha);
            break;
        case RieszOracleMode::vector_riesz_1: {
            if (n != 1 || !(alpha > 0.0 && alpha < 1.0))
                throw ValidationError("fourier_oracle_riesz: need n = 1 and 0 < s < 1");
            Params p;
            p.n = 1;
            p.s = alpha;
            coeff = cns_neg(p);
            break;
        }
        case RieszOracleMode::inverse_length:
            coeff = 1.0 / sphere_area(n);
            alpha = 1.0;
            break;
    }

    const double half = 0.5 * grid.length();
    GridField k = GridField::zeros(grid, n);
    const std::size_t count = grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto x = grid.point(lin);
        const double r = detail::point_norm(x.data(), n);
        if (r == 0.0) continue; // odd kernel: symmetric cell average vanishes
        double taper = 1.0 - smooth_step((r - 0.5 * half) / (0.4 * half));
        double expo = mode == RieszOracleMode::inverse_length ? static_cast<double>(n)
                                                              : n - alpha + 1.0;
        const double scale = coeff * taper / std::pow(r, expo);
        for (int a = 0; a < n; ++a) k.at(lin, a) = scale * x[a];
    }

    SpectralField kh = ft_forward(k, /*enforce_padding=*/false);
    const double dxi = 1.0 / grid.length();
    const double nyq = kh.nyquist();
    const long bin_lo = std::lround(nyq / 32.0 / dxi);
    const long bin_hi = std::lround(nyq / 16.0 / dxi);

    std::map<long, std::pair<double, long>> shells;
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto xi = kh.freq_point(lin);
        const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1]);
        const long bin = std::lround(r / dxi);
        if (bin < bin_lo || bin > bin_hi) continue;
        double mag2 = 0.0;
        for (int a = 0; a < n; ++a) {
            cplx z = kh.at(lin, a);
            mag2 += std::norm(z);
        }
        auto& acc = shells[bin];
        acc.first += std::sqrt(mag2);
        acc.second += 1;
    }

    FourierOracleReport rep;
    rep.mode = mode;
    rep.alpha = alpha;
    rep.band_lo = bin_lo * dxi;
    rep.band_hi = bin_hi * dxi;
    for (auto& [bin, acc] : shells) {
        const double xi = bin * dxi;
        const double analytic = std::pow(2.0 * kPi * xi, -alpha);
        const double shell_avg = acc.first / static_cast<double>(acc.second);
        rep.max_rel_err = std::max(rep.max_rel_err, std::abs(shell_avg - analytic) / analytic);
        ++rep.shells;
    }
    if (rep.shells == 0) throw ValidationError("fourier_oracle_riesz: empty mid band");
    return rep;
}

// Direct quadrature of int x_j |x|^{-(n+s+1)} w(x) sin(2 pi r x_j) dx;
// strictly positive for every r > 0. The j = 1 component is taken (the
// integral is the same for every axis).
inline double sine_moment(const CutoffProfile& cutoff, const Params& params, double r) {
    if (!(r > 0.0)) throw ValidationError("sine_moment: r must be positive");
    const double s = params.s;
    const double delta = params.delta;
    if (params.n == 1) {
        auto f = [&](double x) { return cutoff(x) * std::sin(2.0 * kPi * r * x) / x; };
        return 2.0 * integrate_power_endpoint(f, s, delta, 1e-9);
    }
    // polar: the angular integral is 2 pi J_1(2 pi r rho)
    auto f = [&](double rho) {
        return cutoff(rho) * 2.0 * kPi * std::cyl_bessel_j(1.0, 2.0 * kPi * r * rho) / rho;
    };
    return integrate_power_endpoint(f, s, delta, 1e-9);
}

// Coordinate-aware periodic convolution, (f*g)(x_j) = h^n sum_k f(x_k) g(x_j - x_k)
// with g extended periodically. Direct O(M^2) sum; for oracle use on
// small grids only.
inline GridField circular_convolution_direct(const GridField& f, const GridField& g) {
    if (!f.grid.same_layout(g.grid) || f.components != 1 || g.components != 1)
        throw GridMismatchError("circular_convolution_direct: incompatible fields");
    const GridSpec& grid = f.grid;
    const int N = grid.cells;
    GridField out = GridField::zeros(grid, 1);
    // index of coordinate 0 along an axis (requires lo on the node lattice)
    const double ratio = -grid.lo / grid.h();
    const int zero_idx = static_cast<int>(std::lround(ratio));
    if (std::abs(ratio - zero_idx) > 1e-9)
        throw ValidationError("circular_convolution_direct: origin must sit on the node lattice");
    const std::size_t count = grid.node_count();
    for (std::size_t jlin = 0; jlin < count; ++jlin) {
        auto jj = grid.unindex(jlin);
        double acc = 0.0;
        for (std::size_t klin = 0; klin < count; ++klin) {
            auto kk = grid.unindex(klin);
            const int gi = ((jj[0] - kk[0] + zero_idx) % N + N) % N;
            const int gj = grid.n == 2 ? ((jj[1] - kk[1] + zero_idx) % N + N) % N : 0;
            acc += f.values[klin] * g.values[grid.index(gi, gj)];
        }
        out.values[jlin] = acc * grid.cell_volume();
    }
    return out;
}

// Relative deviation of F(f*g) from F(f) F(g) on the padded grid.
inline double conv_theorem_residual(const GridField& f, const GridField& g) {
    GridField conv = circular_convolution_direct(f, g);
    SpectralField lhs = ft_forward(conv, false);
    SpectralField fh = ft_forward(f, false);
    SpectralField gh = ft_forward(g, false);
    double worst = 0.0, scale = 0.0;
    for (std::size_t lin = 0; lin < lhs.modes.size(); ++lin)
        scale = std::max(scale, std::abs(fh.modes[lin] * gh.modes[lin]));
    for (std::size_t lin = 0; lin < lhs.modes.size(); ++lin)
        worst = std::max(worst, std::abs(lhs.modes[lin] - fh.modes[lin] * gh.modes[lin]));
    return worst / scale;
}

} // namespace nlc
