#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "nlc/cutoff.hpp"
#include "nlc/errors.hpp"
#include "nlc/fft.hpp"
#include "nlc/grid.hpp"
#include "nlc/kernels.hpp"
#include "nlc/params.hpp"
#include "nlc/quadrature.hpp"
#include "nlc/util.hpp"

namespace nlc {

using cplx = std::complex<double>;

// Continuum-scaled discrete Fourier coefficients on a (padded) grid.
// Forward transform approximates int f(x) e^{-2 pi i x.xi} dx, so modes
// carry the h^n weight and the coordinate phase of the box.
struct SpectralField {
    GridSpec grid;
    int components = 1;
    std::vector<cplx> modes; // component planes, like GridField

    cplx& at(std::size_t lin, int c = 0) { return modes[static_cast<std::size_t>(c) * grid.node_count() + lin]; }
    cplx at(std::size_t lin, int c = 0) const { return modes[static_cast<std::size_t>(c) * grid.node_count() + lin]; }

    // Signed frequency of mode index k along one axis.
    double freq(int k) const {
        int kt = k <= grid.cells / 2 ? k : k - grid.cells;
        return kt / grid.length();
    }

    std::array<double, 2> freq_point(std::size_t lin) const {
        auto ij = grid.unindex(lin);
        return {freq(ij[0]), grid.n == 2 ? freq(ij[1]) : 0.0};
    }

    double nyquist() const { return 0.5 * grid.cells / grid.length(); }
};

namespace spectral_detail {

// e^{-2 pi i lo xi_k} per axis, combined over axes for a linear index.
inline void apply_phase(std::vector<cplx>& data, const GridSpec& grid, int dir) {
    const int N = grid.cells;
    std::vector<cplx> ph(N);
    for (int k = 0; k < N; ++k) {
        int kt = k <= N / 2 ? k : k - N;
        double ang = -dir * 2.0 * kPi * grid.lo * kt / grid.length();
        ph[k] = cplx(std::cos(ang), std::sin(ang));
    }
    const std::size_t count = grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto ij = grid.unindex(lin);
        cplx f = ph[ij[0]];
        if (grid.n == 2) f *= ph[ij[1]];
        data[lin] *= f;
    }
}

} // namespace spectral_detail

// Field support must stay half a box away from the boundary (padding
// factor >= 2); otherwise periodic convolutions would wrap.
inline void check_padding(const GridField& field, double rel_threshold = 1e-10) {
    const double radius = support_radius(field, rel_threshold);
    const double quarter = 0.25 * field.grid.length();
    if (radius > quarter + field.grid.h() + 1e-15)
        throw PaddingTooSmallError("check_padding: field support exceeds half the box");
}

inline SpectralField ft_forward(const GridField& field, bool enforce_padding = true) {
    field.grid.validate();
    if (enforce_padding) check_padding(field);
    SpectralField out;
    out.grid = field.grid;
    out.components = field.components;
    const std::size_t count = field.grid.node_count();
    out.modes.resize(count * field.components);
    const double scale = field.grid.cell_volume();
    for (int c = 0; c < field.components; ++c) {
        std::vector<cplx> buf(count);
        for (std::size_t lin = 0; lin < count; ++lin) buf[lin] = field.at(lin, c);
        fft_detail::fft_nd(buf, field.grid, -1);
        spectral_detail::apply_phase(buf, field.grid, +1);
        for (std::size_t lin = 0; lin < count; ++lin)
            out.modes[c * count + lin] = buf[lin] * scale;
    }
    return out;
}

// Inverse transform; returns the real part and optionally reports the
// largest leftover imaginary magnitude.
inline GridField ft_inverse(const SpectralField& spec, double* max_imag = nullptr) {
    GridField out = GridField::zeros(spec.grid, spec.components);
    const std::size_t count = spec.grid.node_count();
    const double norm = 1.0 / (spec.grid.cell_volume() * static_cast<double>(count));
    double imag_peak = 0.0;
    for (int c = 0; c < spec.components; ++c) {
        std::vector<cplx> buf(spec.modes.begin() + static_cast<std::ptrdiff_t>(c * count),
                              spec.modes.begin() + static_cast<std::ptrdiff_t>((c + 1) * count));
        spectral_detail::apply_phase(buf, spec.grid, -1);
        fft_detail::fft_nd(buf, spec.grid, +1);
        for (std::size_t lin = 0; lin < count; ++lin) {
            out.at(lin, c) = buf[lin].real() * norm;
            imag_peak = std::max(imag_peak, std::abs(buf[lin].imag()) * norm);
        }
    }
    if (max_imag) *max_imag = imag_peak;
    return out;
}

// Multiplies scalar modes by 2 pi i xi, producing the transform of the
// gradient. Nyquist modes get factor zero to keep real fields real.
inline SpectralField spectral_gradient(const SpectralField& u) {
    if (u.components != 1) throw ValidationError("spectral_gradient: scalar field expected");
    SpectralField out;
    out.grid = u.grid;
    out.components = u.grid.n;
    const std::size_t count = u.grid.node_count();
    out.modes.assign(count * out.components, cplx(0.0, 0.0));
    const int N = u.grid.cells;
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto ij = u.grid.unindex(lin);
        auto xi = u.freq_point(lin);
        for (int a = 0; a < u.grid.n; ++a) {
            if (ij[a] == N / 2) continue; // Nyquist
            out.modes[static_cast<std::size_t>(a) * count + lin] =
                cplx(0.0, 2.0 * kPi * xi[a]) * u.modes[lin];
        }
    }
    return out;
}

// Samples the kernel Q on a symmetric grid: point values away from the
// origin, exact cell average (equal-volume ball) at the origin node.
inline GridField sample_Q(const RadialKernelTable& table, const GridSpec& grid) {
    grid.validate();
    if (std::abs(grid.lo + grid.hi) > 1e-12 * grid.length())
        throw ValidationError("sample_Q: kernel grid must be symmetric about the origin");
    if (table.params.delta > 0.25 * grid.length() + 1e-15)
        throw PaddingTooSmallError("sample_Q: ball B(0, delta) exceeds half the box");
    GridField q = GridField::zeros(grid, 1);
    const std::size_t count = grid.node_count();
    const double h = grid.h();
    const int n = grid.n;
    // equal-volume ball radius for the singular cell
    const double rc = n == 1 ? 0.5 * h : h / std::sqrt(kPi);
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto x = grid.point(lin);
        const double r = detail::point_norm(x.data(), n);
        if (r < 0.5 * h) {
            q.values[lin] = table.Q_ball_integral(rc) / grid.cell_volume();
        } else if (r < table.params.delta) {
            q.values[lin] = table.Qbar(r);
        }
    }
    return q;
}

// Transform of the sampled kernel. Mode xi = 0 equals the discrete L1
// mass; every mode should be real (even kernel) and strictly positive.
//
// The kernel is sampled on a refine-times finer lattice and the coarse
// modes are read off the fine transform: the sampling bias of the
// |x|^{-(n-1+s)} singularity scales like h^{1-s}, so refinement buys a
// refine^{1-s} accuracy factor at every retained frequency.
inline SpectralField qhat(const RadialKernelTable& table, const GridSpec& grid, int refine = 4) {
    grid.validate();
    if (refine < 1) throw ValidationError("qhat: refine must be >= 1");
    GridSpec fine = grid;
    fine.cells = grid.cells * refine;
    SpectralField fh = ft_forward(sample_Q(table, fine), /*enforce_padding=*/false);
    if (refine == 1) return fh;
    SpectralField out;
    out.grid = grid;
    out.components = 1;
    out.modes.resize(grid.node_count());
    const int n = grid.n;
    const int N = grid.cells;
    const int M = fine.cells;
    for (std::size_t lin = 0; lin < out.modes.size(); ++lin) {
        auto ij = grid.unindex(lin);
        int fi = ij[0] <= N / 2 ? ij[0] : ij[0] - N + M;
        int fj = n == 2 ? (ij[1] <= N / 2 ? ij[1] : ij[1] - N + M) : 0;
        out.modes[lin] = fh.modes[fine.index(fi, fj)];
    }
    return out;
}

inline double qhat_min_real(const SpectralField& q) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& z : q.modes) m = std::min(m, z.real());
    return m;
}

inline double qhat_max_imag(const SpectralField& q) {
    double m = 0.0;
    for (const auto& z : q.modes) m = std::max(m, std::abs(z.imag()));
    return m;
}

// Shell-averaged Q^(xi) |2 pi xi|^{1-s} at the requested shell radii.
// Shells are bins of width one frequency cell; radii must stay below the
// Nyquist frequency.
inline std::vector<double> qhat_tail_ratio(const SpectralField& q, const Params& params,
                                           const std::vector<double>& radii) {
    const double dxi = 1.0 / q.grid.length();
    const double nyq = q.nyquist();
    for (double r : radii)
        if (!(r < nyq)) throw NyquistExceededError("qhat_tail_ratio: shell beyond Nyquist");
    // bin modes by rounded |xi|/dxi
    std::map<long, std::pair<double, long>> shells;
    const std::size_t count = q.grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto xi = q.freq_point(lin);
        double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1]);
        long bin = std::lround(r / dxi);
        if (bin == 0) continue;
        auto& acc = shells[bin];
        acc.first += q.at(lin).real() * std::pow(2.0 * kPi * r, 1.0 - params.s);
        acc.second += 1;
    }
    std::vector<double> out;
    out.reserve(radii.size());
    for (double r : radii) {
        long bin = std::lround(r / dxi);
        auto it = shells.find(bin);
        if (it == shells.end() || it->second.second == 0)
            throw ValidationError("qhat_tail_ratio: empty shell");
        out.push_back(it->second.first / static_cast<double>(it->second.second));
    }
    return out;
}

// V^(xi) = -i xi / (2 pi |xi|^2 Q^(xi)); the xi = 0 mode is set to zero
// (compactly supported data has zero-mean nonlocal gradient, so the
// reconstruction product never sees it).
inline SpectralField vhat(const SpectralField& q, const Params& params) {
    params.validate();
    if (q.components != 1) throw ValidationError("vhat: scalar spectral field expected");
    SpectralField out;
    out.grid = q.grid;
    out.components = q.grid.n;
    const std::size_t count = q.grid.node_count();
    out.modes.assign(count * out.components, cplx(0.0, 0.0));
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto xi = q.freq_point(lin);
        const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
        if (r2 == 0.0) continue;
        const double qr = q.at(lin).real();
        if (!(qr > 0.0))
            throw NonpositiveQhatError("vhat: nonpositive mode of Q^ at |xi|=" +
                                       std::to_string(std::sqrt(r2)));
        const double denom = 2.0 * kPi * r2 * qr;
        for (int a = 0; a < out.components; ++a)
            out.modes[static_cast<std::size_t>(a) * count + lin] = cplx(0.0, -xi[a] / denom);
    }
    return out;
}

// Samples of the classical kernel x/(sigma_{n-1}|x|^n); zero at the
// origin (odd, the symmetric cell average vanishes).
inline GridField sample_classical_kernel(const GridSpec& grid) {
    grid.validate();
    GridField k = GridField::zeros(grid, grid.n);
    const std::size_t count = grid.node_count();
    const double sigma = sphere_area(grid.n);
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto x = grid.point(lin);
        const double r = detail::point_norm(x.data(), grid.n);
        if (r == 0.0) continue;
        const double scale = 1.0 / (sigma * std::pow(r, grid.n));
        for (int a = 0; a < grid.n; ++a) k.at(lin, a) = scale * x[a];
    }
    return k;
}

// Inverse kernel V with its singular comparison split off:
// V(x) = W(x) + (c_{n,-s}/a0) x/|x|^{n+1-s} with W bounded.
//
// V tends to the classical kernel over Q^(0) at infinity, which decays
// like |x|^{1-n}; inverting the raw symbol on a periodic box would fold
// that tail back in (for n = 1 it aliases to an x/L sawtooth that no
// affordable padding suppresses). The far field is therefore carried by
// the sampled classical kernel, whose odd periodization telescopes away,
// and only the decaying remainder symbol goes through the inverse DFT:
//   V^_used = F(K_samples)/Q^(0) + (V^ - K^_analytic/Q^(0)).
//
// w_sup is measured on |x| in [max(delta/8, 48h), 0.375 L]: the inner cut
// avoids the near-origin cells where the discrete V carries the sampling
// error of the singular part (a fixed number of cells, hence the 48h
// floor on coarse grids), the outer cut avoids wraparound.
struct InverseKernelField {
    GridField V;
    GridField remainder;
    SpectralField vhat_field; // periodization-corrected spectrum used everywhere
    double w_sup = 0.0;
    double w_window_lo = 0.0, w_window_hi = 0.0;
};

inline InverseKernelField v_kernel(const SpectralField& qh, const Params& params,
                                   const CutoffProfile& cutoff) {
    SpectralField vh = vhat(qh, params);
    const double q0 = qh.modes[0].real();
    SpectralField kh = ft_forward(sample_classical_kernel(qh.grid), false);
    const std::size_t count = qh.grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto xi = vh.freq_point(lin);
        const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
        for (int a = 0; a < vh.components; ++a) {
            cplx analytic = r2 == 0.0 ? cplx(0.0, 0.0)
                                      : cplx(0.0, -xi[a] / (2.0 * kPi * r2));
            auto& mode = vh.modes[static_cast<std::size_t>(a) * count + lin];
            mode += (kh.modes[static_cast<std::size_t>(a) * count + lin] - analytic) / q0;
        }
    }

    InverseKernelField out;
    out.vhat_field = vh;
    out.V = ft_inverse(vh);
    out.remainder = GridField::zeros(qh.grid, qh.grid.n);
    const double coeff = cns_neg(params) / cutoff.a0;
    const int n = vh.grid.n;
    out.w_window_lo = std::max(params.delta / 8.0, 48.0 * vh.grid.h());
    out.w_window_hi = 0.375 * vh.grid.length();
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto x = vh.grid.point(lin);
        const double r = detail::point_norm(x.data(), n);
        if (r == 0.0) continue;
        const double scale = coeff / std::pow(r, n + 1 - params.s);
        double w2 = 0.0;
        for (int a = 0; a < n; ++a) {
            double w = out.V.at(lin, a) - scale * x[a];
            out.remainder.at(lin, a) = w;
            w2 += w * w;
        }
        if (r >= out.w_window_lo && r <= out.w_window_hi)
            out.w_sup = std::max(out.w_sup, std::sqrt(w2));
    }
    return out;
}

// Least-squares slope of log |V| against log |x| over a radial window.
inline double v_decay_slope(const GridField& V, double r_lo, double r_hi) {
    std::vector<double> lx, ly;
    const std::size_t count = V.grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto x = V.grid.point(lin);
        const double r = detail::point_norm(x.data(), V.grid.n);
        if (r < r_lo || r > r_hi) continue;
        const double mag = V.magnitude(lin);
        if (mag <= 0.0) continue;
        lx.push_back(std::log(r));
        ly.push_back(std::log(mag));
    }
    if (lx.size() < 4) throw ValidationError("v_decay_slope: window holds too few nodes");
    return fit_slope(lx, ly);
}

// Max relative deviation of the direct-space discrete convolution V * Q
// from y/(sigma_{n-1} |y|^n) over the annulus r0 <= |y| <= r1.
inline double conv_identity_residual(const InverseKernelField& vk, const RadialKernelTable& table,
                                     double r0, double r1, std::size_t max_probes = 4096) {
    const GridSpec& grid = vk.V.grid;
    const int n = grid.n;
    const double h = grid.h();
    const double delta = table.params.delta;
    if (r0 <= h || r1 + delta >= 0.5 * grid.length())
        throw ValidationError("conv_identity_residual: annulus touches origin cell or boundary");
    const GridField qs = sample_Q(table, grid);

    std::vector<std::size_t> probes;
    const std::size_t count = grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto y = grid.point(lin);
        const double r = detail::point_norm(y.data(), n);
        if (r >= r0 && r <= r1) probes.push_back(lin);
    }
    if (probes.size() > max_probes) {
        std::vector<std::size_t> sub;
        for (std::size_t i = 0; i < max_probes; ++i)
            sub.push_back(probes[i * probes.size() / max_probes]);
        probes.swap(sub);
    }

    const int reach = static_cast<int>(std::ceil(delta / h));
    const double sigma = sphere_area(n);
    std::vector<double> errs(probes.size(), 0.0);
    parallel_for(probes.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t pi = begin; pi < end; ++pi) {
            const std::size_t lin = probes[pi];
            auto ij = grid.unindex(lin);
            auto y = grid.point(lin);
            double acc[2] = {0.0, 0.0};
            for (int di = -reach; di <= reach; ++di) {
                const int zi = ij[0] + di;
                for (int dj = (n == 2 ? -reach : 0); dj <= (n == 2 ? reach : 0); ++dj) {
                    // Q(y - z) sample lives at index offset (di, dj) in the
                    // kernel field (kernel grid is origin-centred).
                    const double off[2] = {di * h, dj * h};
                    const double rr = detail::point_norm(off, n);
                    if (rr >= delta + h) continue;
                    const int qi = (-di + grid.cells) % grid.cells;
                    const int qj = (-dj + grid.cells) % grid.cells;
                    // kernel index of coordinate (-di,-dj)*h
                    std::size_t qlin = grid.index((qi + grid.cells / 2) % grid.cells,
                                                  n == 2 ? (qj + grid.cells / 2) % grid.cells : 0);
                    const double qv = qs.values[qlin];
                    if (qv == 0.0) continue;
                    const int zj = n == 2 ? ij[1] + dj : 0;
                    std::size_t zlin = grid.index(zi, zj);
                    for (int a = 0; a < n; ++a) acc[a] += vk.V.at(zlin, a) * qv;
                }
            }
            double rhs[2] = {0.0, 0.0};
            const double ry = detail::point_norm(y.data(), n);
            for (int a = 0; a < n; ++a) rhs[a] = y[a] / (sigma * std::pow(ry, n));
            double diff = 0.0, mag = 0.0;
            for (int a = 0; a < n; ++a) {
                const double d = acc[a] * grid.cell_volume() - rhs[a];
                diff += d * d;
                mag += rhs[a] * rhs[a];
            }
            errs[pi] = std::sqrt(diff / mag);
        }
    });
    double worst = 0.0;
    for (double e : errs) worst = std::max(worst, e);
    return worst;
}

} // namespace nlc
