#pragma once

#include <cmath>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/grid.hpp"
#include "nlc/operators.hpp"
#include "nlc/spectral.hpp"

namespace nlc {

struct ReconstructionReport {
    double rel_l2_error = 0.0;
    double rel_linf_error = 0.0;
    GridSpec grid;
    Params params;
};

// Classical representation: phi = grad phi * x/(sigma_{n-1}|x|^n),
// evaluated as a discrete convolution of the spectral gradient with the
// sampled kernel (odd kernel, so the singular cell averages to zero).
inline GridField classical_rep(const GridField& phi) {
    if (phi.components != 1) throw ValidationError("classical_rep: scalar field expected");
    const GridSpec& grid = phi.grid;
    if (std::abs(grid.lo + grid.hi) > 1e-12 * grid.length())
        throw ValidationError("classical_rep: grid must be symmetric about the origin");
    check_padding(phi);

    GridField kernel = GridField::zeros(grid, grid.n);
    const std::size_t count = grid.node_count();
    const double sigma = sphere_area(grid.n);
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto x = grid.point(lin);
        const double r = detail::point_norm(x.data(), grid.n);
        if (r == 0.0) continue;
        const double scale = 1.0 / (sigma * std::pow(r, grid.n));
        for (int a = 0; a < grid.n; ++a) kernel.at(lin, a) = scale * x[a];
    }
    SpectralField kh = ft_forward(kernel, false);
    SpectralField gh = spectral_gradient(ft_forward(phi, false));

    SpectralField prod;
    prod.grid = grid;
    prod.components = 1;
    prod.modes.assign(count, cplx(0.0, 0.0));
    for (int a = 0; a < grid.n; ++a)
        for (std::size_t lin = 0; lin < count; ++lin)
            prod.modes[lin] += gh.modes[static_cast<std::size_t>(a) * count + lin] *
                               kh.modes[static_cast<std::size_t>(a) * count + lin];
    return ft_inverse(prod);
}

// Reconstruction from the nonlocal gradient: u = g * V, evaluated as the
// spectral product sum_a F(g_a) V^_a (V carries an integrable singularity
// and long tails, so the already-regularized spectrum is the stable side).
inline GridField nl_ftc_reconstruct(const GridField& g, const InverseKernelField& vk) {
    if (!g.grid.same_layout(vk.vhat_field.grid))
        throw GridMismatchError("nl_ftc_reconstruct: field and kernel grids differ");
    if (g.components != g.grid.n) throw ValidationError("nl_ftc_reconstruct: vector field expected");
    check_padding(g);
    const std::size_t count = g.grid.node_count();
    SpectralField prod;
    prod.grid = g.grid;
    prod.components = 1;
    prod.modes.assign(count, cplx(0.0, 0.0));
    for (int a = 0; a < g.grid.n; ++a) {
        GridField comp = GridField::zeros(g.grid, 1);
        for (std::size_t lin = 0; lin < count; ++lin) comp.values[lin] = g.at(lin, a);
        SpectralField ch = ft_forward(comp, false);
        for (std::size_t lin = 0; lin < count; ++lin)
            prod.modes[lin] += ch.modes[lin] * vk.vhat_field.at(lin, a);
    }
    return ft_inverse(prod);
}

// Round trip u -> nonlocal gradient -> reconstruction, with errors
// restricted to supp u (truncation error concentrates in the far field).
inline ReconstructionReport ftc_roundtrip_report(const GridField& u, const RadialKernelTable& table,
                                                 const InverseKernelField& vk,
                                                 SingularRule rule = SingularRule::cell_average) {
    StencilWeights w = StencilWeights::build(u.grid, table, rule);
    GridField g = nl_gradient(u, w, interior_mask(u.grid, table.params.delta));
    GridField rec = nl_ftc_reconstruct(g, vk);

    double peak = 0.0;
    const std::size_t count = u.grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) peak = std::max(peak, std::abs(u.values[lin]));
    if (peak == 0.0) throw ValidationError("ftc_roundtrip_report: zero field");
    const double thr = 1e-12 * peak;

    double num2 = 0.0, den2 = 0.0, numi = 0.0, deni = 0.0;
    for (std::size_t lin = 0; lin < count; ++lin) {
        if (std::abs(u.values[lin]) <= thr) continue;
        const double d = rec.values[lin] - u.values[lin];
        num2 += d * d;
        den2 += u.values[lin] * u.values[lin];
        numi = std::max(numi, std::abs(d));
        deni = std::max(deni, std::abs(u.values[lin]));
    }
    ReconstructionReport rep;
    rep.rel_l2_error = std::sqrt(num2 / den2);
    rep.rel_linf_error = numi / deni;
    rep.grid = u.grid;
    rep.params = table.params;
    return rep;
}

} // namespace nlc
