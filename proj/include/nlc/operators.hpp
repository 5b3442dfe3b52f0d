#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/grid.hpp"
#include "nlc/kernels.hpp"
#include "nlc/spectral.hpp"
#include "nlc/util.hpp"

namespace nlc {

// How the cell containing the kernel singularity contributes.
// cell_average: exact radial integral over the equal-volume ball paired
// with a central difference quotient. skip: drop the cell (cruder, kept
// for comparison runs).
enum class SingularRule { cell_average, skip };

struct OperatorConfig {
    RadialKernelTable table;
    SingularRule rule = SingularRule::cell_average;
};

// Quadrature weights of the delta-ball stencil on a fixed grid. Each
// offset z carries the vector weight
//   vec(z) = c_{n,s} h^n w(|z|) z / |z|^{n+s+1},
// so that  Du(x)      = sum_z (u(x+z) - u(x)) vec(z)   + m grad_fd u(x),
//          div phi(x) = sum_z (phi(x+z) - phi(x)).vec(z) + m div_fd phi(x).
// m is the exact kernel moment of the equal-volume ball at the origin.
struct StencilWeights {
    int reach = 0;                  // stencil radius in cells
    std::vector<std::ptrdiff_t> off; // linear offset of z
    std::vector<double> wx, wy;
    double moment = 0.0;
    double h = 0.0;
    int n = 1;
    std::ptrdiff_t row = 0; // linear offset of one step along axis 0

    static StencilWeights build(const GridSpec& grid, const RadialKernelTable& table,
                                SingularRule rule = SingularRule::cell_average) {
        grid.validate();
        const Params& params = table.params;
        if (grid.n != params.n) throw GridMismatchError("StencilWeights: dimension mismatch");
        StencilWeights w;
        w.n = grid.n;
        w.h = grid.h();
        w.row = grid.n == 1 ? 1 : grid.cells;
        const double delta = params.delta;
        w.reach = static_cast<int>(std::ceil(delta / w.h));
        if (w.reach < 1) throw ValidationError("StencilWeights: horizon below one cell");
        const double cmass = cns_const(params) * grid.cell_volume();
        const double cns = cns_const(params);
        const CutoffProfile& cut = table.cutoff;
        const double s = params.s;
        // The singular block: cells with |z|_inf <= near*h contribute via
        // the exact second kernel moment of their union (a square on the
        // plateau) applied to a difference-quotient gradient, extending the
        // equal-volume-ball rule of the origin cell. Point weights carry
        // the rest. The midpoint rule's O(h^{1-s}) lattice bias lives in
        // that block; the moment rule replaces it with O(h^{3-s}).
        int near = (rule == SingularRule::cell_average) ? 3 : 0;
        if ((near + 1.5) * w.h >= cut.b0 * delta) near = 0;
        for (int di = -w.reach; di <= w.reach; ++di) {
            for (int dj = (w.n == 2 ? -w.reach : 0); dj <= (w.n == 2 ? w.reach : 0); ++dj) {
                if (std::abs(di) <= near && std::abs(dj) <= near) continue;
                if (di == 0 && dj == 0) continue;
                const double z[2] = {di * w.h, dj * w.h};
                const double r = std::sqrt(z[0] * z[0] + z[1] * z[1]);
                if (r >= delta) continue;
                const double wr = cut(r);
                if (wr == 0.0) continue;
                const double scale = cmass * wr / std::pow(r, w.n + s + 1);
                w.off.push_back(static_cast<std::ptrdiff_t>(di) * w.row + dj);
                w.wx.push_back(scale * z[0]);
                w.wy.push_back(w.n == 2 ? scale * z[1] : 0.0);
            }
        }
        if (rule == SingularRule::cell_average) {
            if (near > 0) {
                // second moment of the kernel over the square block
                const double R = (near + 0.5) * w.h;
                if (w.n == 1) {
                    w.moment = cns * cut.a0 * 2.0 * std::pow(R, 1.0 - s) / (1.0 - s);
                } else {
                    const int m = 4096;
                    double acc = 0.0;
                    for (int i = 0; i < m; ++i) {
                        const double th = 2.0 * kPi * i / m;
                        const double rho = R / std::max(std::abs(std::cos(th)),
                                                        std::abs(std::sin(th)));
                        acc += std::cos(th) * std::cos(th) * std::pow(rho, 1.0 - s);
                    }
                    w.moment = cns * cut.a0 * acc * (2.0 * kPi / m) / (1.0 - s);
                }
            } else {
                // equal-volume-ball rule for the origin cell alone
                const double rc = w.n == 1 ? 0.5 * w.h : w.h / std::sqrt(kPi);
                const double inner = cut.b0 * delta;
                const double r0 = std::min(rc, inner);
                double radial = cut.a0 * std::pow(r0, 1.0 - s) / (1.0 - s);
                if (rc > inner) {
                    auto f = [&](double r) { return cut(r) * std::pow(r, -s); };
                    radial += integrate(f, inner, std::min(rc, delta), 1e-13);
                }
                w.moment = cns * sphere_area(w.n) / w.n * radial;
            }
        }
        return w;
    }
};

namespace op_detail {

inline void require_stencil_fits(const GridSpec& grid, const StencilWeights& w, const Mask& mask) {
    const std::size_t count = grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        if (!mask[lin]) continue;
        auto ij = grid.unindex(lin);
        for (int a = 0; a < grid.n; ++a)
            if (ij[a] - w.reach < 0 || ij[a] + w.reach >= grid.cells)
                throw StencilOverflowError("operator stencil exits the grid box");
    }
}

} // namespace op_detail

// Nonlocal gradient by direct quadrature over the delta ball, evaluated
// at the masked nodes (zero elsewhere). u must be finite on x + B(0,delta)
// for every masked x; the stencil never wraps.
inline GridField nl_gradient(const GridField& u, const StencilWeights& w, const Mask& eval_mask) {
    const GridSpec& grid = u.grid;
    if (u.components != 1) throw ValidationError("nl_gradient: scalar field expected");
    if (eval_mask.size() != grid.node_count()) throw GridMismatchError("nl_gradient: mask mismatch");
    op_detail::require_stencil_fits(grid, w, eval_mask);
    GridField out = GridField::zeros(grid, grid.n);
    const std::size_t count = grid.node_count();
    const std::size_t offs = w.off.size();
    const double inv2h = 0.5 / w.h;
    const double* uv = u.values.data();
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        for (std::size_t lin = begin; lin < end; ++lin) {
            if (!eval_mask[lin]) continue;
            const auto base = static_cast<std::ptrdiff_t>(lin);
            const double uc = uv[lin];
            double gx = 0.0, gy = 0.0;
            for (std::size_t k = 0; k < offs; ++k) {
                const double d = uv[base + w.off[k]] - uc;
                gx += d * w.wx[k];
                gy += d * w.wy[k];
            }
            if (w.moment != 0.0) {
                gx += w.moment * (uv[base + w.row] - uv[base - w.row]) * inv2h;
                if (grid.n == 2) gy += w.moment * (uv[base + 1] - uv[base - 1]) * inv2h;
            }
            out.values[lin] = gx;
            if (grid.n == 2) out.values[count + lin] = gy;
        }
    });
    return out;
}

inline GridField nl_gradient(const GridField& u, const OperatorConfig& cfg, const Mask& eval_mask) {
    return nl_gradient(u, StencilWeights::build(u.grid, cfg.table, cfg.rule), eval_mask);
}

// Nonlocal divergence in the absolutely convergent antisymmetric form.
// phi is expected to vanish outside omega; same stencil as the gradient.
inline GridField nl_divergence(const GridField& phi, const StencilWeights& w, const Mask& eval_mask) {
    const GridSpec& grid = phi.grid;
    if (phi.components != grid.n) throw ValidationError("nl_divergence: vector field expected");
    if (eval_mask.size() != grid.node_count()) throw GridMismatchError("nl_divergence: mask mismatch");
    op_detail::require_stencil_fits(grid, w, eval_mask);
    GridField out = GridField::zeros(grid, 1);
    const std::size_t count = grid.node_count();
    const std::size_t offs = w.off.size();
    const double inv2h = 0.5 / w.h;
    const double* px = phi.values.data();
    const double* py = grid.n == 2 ? phi.values.data() + count : nullptr;
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        for (std::size_t lin = begin; lin < end; ++lin) {
            if (!eval_mask[lin]) continue;
            const auto base = static_cast<std::ptrdiff_t>(lin);
            double acc = 0.0;
            if (grid.n == 1) {
                const double pc = px[lin];
                for (std::size_t k = 0; k < offs; ++k)
                    acc += (px[base + w.off[k]] - pc) * w.wx[k];
                if (w.moment != 0.0) acc += w.moment * (px[base + 1] - px[base - 1]) * inv2h;
            } else {
                const double pcx = px[lin], pcy = py[lin];
                for (std::size_t k = 0; k < offs; ++k) {
                    const auto at = base + w.off[k];
                    acc += (px[at] - pcx) * w.wx[k] + (py[at] - pcy) * w.wy[k];
                }
                if (w.moment != 0.0)
                    acc += w.moment * ((px[base + w.row] - px[base - w.row]) +
                                       (py[base + 1] - py[base - 1])) * inv2h;
            }
            out.values[lin] = acc;
        }
    });
    return out;
}

inline GridField nl_divergence(const GridField& phi, const OperatorConfig& cfg, const Mask& eval_mask) {
    return nl_divergence(phi, StencilWeights::build(phi.grid, cfg.table, cfg.rule), eval_mask);
}

// Exact transpose of the discrete nonlocal gradient: scalar field A with
// <Du, psi> = <u, A(psi)> summed over the evaluation mask. Coincides with
// the negated antisymmetric divergence at nodes whose reverse stencil
// stays inside the mask.
inline GridField nl_gradient_adjoint(const GridField& psi, const StencilWeights& w,
                                     const Mask& eval_mask) {
    const GridSpec& grid = psi.grid;
    if (psi.components != grid.n) throw ValidationError("nl_gradient_adjoint: vector field expected");
    op_detail::require_stencil_fits(grid, w, eval_mask);
    GridField out = GridField::zeros(grid, 1);
    const std::size_t count = grid.node_count();
    const std::size_t offs = w.off.size();
    const double inv2h = 0.5 / w.h;
    const double* px = psi.values.data();
    const double* py = grid.n == 2 ? psi.values.data() + count : nullptr;
    for (std::size_t lin = 0; lin < count; ++lin) {
        if (!eval_mask[lin]) continue;
        const auto base = static_cast<std::ptrdiff_t>(lin);
        const double vx = px[lin];
        const double vy = grid.n == 2 ? py[lin] : 0.0;
        double diag = 0.0;
        for (std::size_t k = 0; k < offs; ++k) {
            const double t = vx * w.wx[k] + (grid.n == 2 ? vy * w.wy[k] : 0.0);
            out.values[base + w.off[k]] += t;
            diag -= t;
        }
        out.values[lin] += diag;
        if (w.moment != 0.0) {
            const double mx = w.moment * vx * inv2h;
            out.values[base + w.row] += mx;
            out.values[base - w.row] -= mx;
            if (grid.n == 2) {
                const double my = w.moment * vy * inv2h;
                out.values[base + 1] += my;
                out.values[base - 1] -= my;
            }
        }
    }
    return out;
}

// Convolution form of the nonlocal gradient: spectral derivative of u
// multiplied by the transform of the sampled kernel. u must be compactly
// supported with room for the horizon inside the box.
inline GridField nl_gradient_conv(const GridField& u, const RadialKernelTable& table) {
    if (u.components != 1) throw ValidationError("nl_gradient_conv: scalar field expected");
    const double radius = support_radius(u);
    if (radius + table.params.delta >= 0.5 * u.grid.length())
        throw SupportOverflowError("nl_gradient_conv: supp u + B(0,delta) exits the box");
    SpectralField uh = ft_forward(u, false);
    SpectralField gh = spectral_gradient(uh);
    SpectralField qh = qhat(table, u.grid);
    const std::size_t count = u.grid.node_count();
    for (int a = 0; a < gh.components; ++a)
        for (std::size_t lin = 0; lin < count; ++lin)
            gh.modes[static_cast<std::size_t>(a) * count + lin] *= qh.modes[lin];
    return ft_inverse(gh);
}

// The three terms of the integration-by-parts identity; their sum is the
// residual and vanishes in the continuum. The collar term is zero,
// bit-exactly, whenever phi vanishes outside the inner domain.
struct IbpTerms {
    double grad_pairing = 0.0; // int_omega Du . phi
    double div_pairing = 0.0;  // int_omega u div phi
    double collar_term = 0.0;  // boundary double integral
    double residual() const { return std::abs(grad_pairing + div_pairing + collar_term); }
};

inline IbpTerms ibp_terms(const GridField& u, const GridField& phi, const StencilWeights& w,
                          const DomainMasks& masks) {
    const GridSpec& grid = u.grid;
    if (!grid.same_layout(phi.grid)) throw GridMismatchError("ibp_terms: grid mismatch");
    const std::size_t count = grid.node_count();
    const double vol = grid.cell_volume();

    GridField Du = nl_gradient(u, w, masks.omega);
    GridField divphi = nl_divergence(phi, w, masks.omega);

    std::vector<double> t1, t2;
    t1.reserve(masks.omega_count);
    t2.reserve(masks.omega_count);
    for (std::size_t lin = 0; lin < count; ++lin) {
        if (!masks.omega[lin]) continue;
        double dot = Du.at(lin, 0) * phi.at(lin, 0);
        if (grid.n == 2) dot += Du.at(lin, 1) * phi.at(lin, 1);
        t1.push_back(dot);
        t2.push_back(u.values[lin] * divphi.values[lin]);
    }

    // collar term: (n-1+s) iint u(y) phi(x).(x-y)/|x-y|^2 rho(x-y) dy dx
    // reorganized through the stencil weights as
    //   -h^n sum_{x in omega} sum_{x+z in collar} u(x+z) phi(x).vec(z).
    std::vector<double> t3;
    for (std::size_t lin = 0; lin < count; ++lin) {
        if (!masks.omega[lin]) continue;
        const auto base = static_cast<std::ptrdiff_t>(lin);
        const double phx = phi.at(lin, 0);
        const double phy = grid.n == 2 ? phi.at(lin, 1) : 0.0;
        if (phx == 0.0 && phy == 0.0) continue;
        double acc = 0.0;
        for (std::size_t k = 0; k < w.off.size(); ++k) {
            const auto at = static_cast<std::size_t>(base + w.off[k]);
            if (!masks.collar[at]) continue;
            acc -= u.values[at] * (phx * w.wx[k] + phy * w.wy[k]);
        }
        if (acc != 0.0) t3.push_back(acc);
    }

    IbpTerms out;
    out.grad_pairing = vol * block_sum(t1);
    out.div_pairing = vol * block_sum(t2);
    out.collar_term = vol * block_sum(t3);
    return out;
}

inline double ibp_residual(const GridField& u, const GridField& phi, const StencilWeights& w,
                           const DomainMasks& masks) {
    return ibp_terms(u, phi, w, masks).residual();
}

} // namespace nlc
