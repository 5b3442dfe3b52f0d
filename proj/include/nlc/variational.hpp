#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/grid.hpp"
#include "nlc/operators.hpp"
#include "nlc/util.hpp"

namespace nlc {

// Integrand of the energy I(u) = int_omega W(x, u(x), Du(x)) dx with its
// partial derivatives in the value and gradient slots. z carries n
// components.
struct EnergySpec {
    std::function<double(const double* x, double y, const double* z)> W;
    std::function<double(const double* x, double y, const double* z)> DyW;
    std::function<void(const double* x, double y, const double* z, double* out)> DzW;
    bool convex_in_z = true;
    double coercivity_p = 2.0;
};

// Derivative consistency by central differences at random probes, and
// midpoint convexity in z when declared.
inline void validate_energy_spec(const EnergySpec& spec, int n, std::uint64_t seed = 42) {
    if (!spec.W || !spec.DyW || !spec.DzW) throw ValidationError("EnergySpec: missing evaluator");
    Rng rng(seed);
    const double step = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        double x[2] = {rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
        double y = rng.uniform(-2.0, 2.0);
        double z[2] = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const double scale = 1.0 + std::abs(spec.W(x, y, z));

        const double dy_fd =
            (spec.W(x, y + step, z) - spec.W(x, y - step, z)) / (2.0 * step);
        if (std::abs(dy_fd - spec.DyW(x, y, z)) > 1e-5 * scale)
            throw ValidationError("EnergySpec: DyW inconsistent with W");

        double dz[2];
        spec.DzW(x, y, z, dz);
        for (int a = 0; a < n; ++a) {
            double zp[2] = {z[0], z[1]}, zm[2] = {z[0], z[1]};
            zp[a] += step;
            zm[a] -= step;
            const double fd = (spec.W(x, y, zp) - spec.W(x, y, zm)) / (2.0 * step);
            if (std::abs(fd - dz[a]) > 1e-5 * scale)
                throw ValidationError("EnergySpec: DzW inconsistent with W");
        }

        if (spec.convex_in_z) {
            double za[2] = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            double zb[2] = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            double zm[2] = {0.5 * (za[0] + zb[0]), 0.5 * (za[1] + zb[1])};
            if (spec.W(x, y, zm) > 0.5 * (spec.W(x, y, za) + spec.W(x, y, zb)) + 1e-10 * scale)
                throw ValidationError("EnergySpec: declared convex but midpoint convexity fails");
        }
    }
}

struct MinimizeConfig {
    int max_iters = 10000;
    double tolerance = 1e-8;    // relative first-variation norm at exit
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    double grow = 1.5;
    double momentum = 0.0;      // heavy-ball coefficient, 0 disables
    GridField datum;            // boundary values g on the constrained nodes
};

struct MinimizeResult {
    GridField u;
    std::vector<double> energy_trace;
    double first_variation_norm = 0.0; // absolute L2 norm of the free-node gradient
    double strong_residual = 0.0;      // filled by el_strong_residual when requested
    int iterations = 0;
    bool converged = false;
};

namespace var_detail {

struct Evaluated {
    GridField du;        // nonlocal gradient on omega
    GridField dens_dy;   // DyW density on omega
    GridField dens_dz;   // DzW field on omega (zero outside)
    double energy = 0.0;
};

inline Evaluated evaluate(const EnergySpec& spec, const GridField& u, const StencilWeights& w,
                          const DomainMasks& masks) {
    const GridSpec& grid = u.grid;
    Evaluated ev;
    ev.du = nl_gradient(u, w, masks.omega);
    ev.dens_dy = GridField::zeros(grid, 1);
    ev.dens_dz = GridField::zeros(grid, grid.n);
    std::vector<double> terms;
    terms.reserve(masks.omega_count);
    const std::size_t count = grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        if (!masks.omega[lin]) continue;
        auto x = grid.point(lin);
        double z[2] = {ev.du.at(lin, 0), grid.n == 2 ? ev.du.at(lin, 1) : 0.0};
        const double wv = spec.W(x.data(), u.values[lin], z);
        if (!std::isfinite(wv)) throw NonFiniteError("energy integrand is not finite");
        terms.push_back(wv);
        ev.dens_dy.values[lin] = spec.DyW(x.data(), u.values[lin], z);
        double dz[2];
        spec.DzW(x.data(), u.values[lin], z, dz);
        for (int a = 0; a < grid.n; ++a) ev.dens_dz.at(lin, a) = dz[a];
    }
    ev.energy = grid.cell_volume() * block_sum(terms);
    return ev;
}

} // namespace var_detail

// Midpoint-rule energy over omega.
inline double energy_eval(const EnergySpec& spec, const GridField& u, const StencilWeights& w,
                          const DomainMasks& masks) {
    return var_detail::evaluate(spec, u, w, masks).energy;
}

inline double energy_eval(const EnergySpec& spec, const GridField& u, const RadialKernelTable& table,
                          const DomainMasks& masks) {
    return energy_eval(spec, u, StencilWeights::build(u.grid, table), masks);
}

// Weak-form pairing int_omega [DyW phi + DzW . D phi] dx; vanishes at a
// minimizer for perturbations supported in the inner domain.
inline double energy_first_variation(const EnergySpec& spec, const GridField& u,
                                     const GridField& phi, const StencilWeights& w,
                                     const DomainMasks& masks) {
    const GridSpec& grid = u.grid;
    if (!grid.same_layout(phi.grid)) throw GridMismatchError("energy_first_variation: grid mismatch");
    auto ev = var_detail::evaluate(spec, u, w, masks);
    GridField dphi = nl_gradient(phi, w, masks.omega);
    std::vector<double> terms;
    terms.reserve(masks.omega_count);
    const std::size_t count = grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        if (!masks.omega[lin]) continue;
        double dot = ev.dens_dz.at(lin, 0) * dphi.at(lin, 0);
        if (grid.n == 2) dot += ev.dens_dz.at(lin, 1) * dphi.at(lin, 1);
        terms.push_back(ev.dens_dy.values[lin] * phi.values[lin] + dot);
    }
    return grid.cell_volume() * block_sum(terms);
}

// The discrete energy gradient on the free (inner) nodes: h^n (DyW + D^T DzW).
inline GridField energy_gradient_field(const var_detail::Evaluated& ev, const StencilWeights& w,
                                       const DomainMasks& masks) {
    GridField adj = nl_gradient_adjoint(ev.dens_dz, w, masks.omega);
    GridField g = GridField::zeros(adj.grid, 1);
    const double vol = adj.grid.cell_volume();
    for (std::size_t lin = 0; lin < adj.grid.node_count(); ++lin)
        if (masks.inner[lin])
            g.values[lin] = vol * (ev.dens_dy.values[lin] + adj.values[lin]);
    return g;
}

// Projected first-order descent with Armijo backtracking and optional
// heavy-ball momentum. Free nodes are the inner-domain nodes; all other
// nodes hold the datum. The energy trace is non-increasing.
inline MinimizeResult minimize(const EnergySpec& spec, const MinimizeConfig& cfg,
                               const DomainMasks& masks, const RadialKernelTable& table) {
    const GridSpec& grid = cfg.datum.grid;
    grid.validate();
    if (!(cfg.tolerance > 0.0)) throw ValidationError("minimize: tolerance must be positive");
    for (double v : cfg.datum.values)
        if (!std::isfinite(v)) throw ValidationError("minimize: datum must be finite");
    StencilWeights w = StencilWeights::build(grid, table);

    MinimizeResult res;
    res.u = cfg.datum;
    auto ev = var_detail::evaluate(spec, res.u, w, masks);
    res.energy_trace.push_back(ev.energy);

    const std::size_t count = grid.node_count();
    GridField step_prev = GridField::zeros(grid, 1);
    double t = 1.0;
    double gnorm0 = -1.0;

    for (int it = 0; it < cfg.max_iters; ++it) {
        GridField g = energy_gradient_field(ev, w, masks);
        double g2 = 0.0;
        for (std::size_t lin = 0; lin < count; ++lin) g2 += g.values[lin] * g.values[lin];
        const double gnorm = std::sqrt(g2);
        res.first_variation_norm = gnorm;
        if (gnorm0 < 0.0) gnorm0 = gnorm;
        if (gnorm <= cfg.tolerance * std::max(1.0, gnorm0)) {
            res.converged = true;
            res.iterations = it;
            return res;
        }

        // descent direction: -g plus momentum, reset if not a descent dir
        GridField dir = GridField::zeros(grid, 1);
        double gd = 0.0;
        for (std::size_t lin = 0; lin < count; ++lin) {
            dir.values[lin] = -g.values[lin] + cfg.momentum * step_prev.values[lin];
            gd += g.values[lin] * dir.values[lin];
        }
        if (gd >= 0.0) {
            for (std::size_t lin = 0; lin < count; ++lin) dir.values[lin] = -g.values[lin];
            gd = -g2;
        }

        // Armijo backtracking; accepted steps strictly decrease the energy
        const double t0 = t * cfg.grow;
        double trial = t0;
        bool accepted = false;
        GridField u_trial = res.u;
        while (trial > 1e-16 * t0) {
            for (std::size_t lin = 0; lin < count; ++lin)
                u_trial.values[lin] = res.u.values[lin] + trial * dir.values[lin];
            auto ev_trial = var_detail::evaluate(spec, u_trial, w, masks);
            if (ev_trial.energy <= ev.energy + cfg.armijo_c1 * trial * gd &&
                ev_trial.energy < ev.energy) {
                for (std::size_t lin = 0; lin < count; ++lin)
                    step_prev.values[lin] = trial * dir.values[lin];
                res.u = u_trial;
                ev = std::move(ev_trial);
                t = trial;
                accepted = true;
                break;
            }
            trial *= cfg.backtrack;
        }
        if (!accepted) {
            // no strictly decreasing step: either the energy sits at its
            // rounding floor near the optimum, or the derivatives are wrong
            if (gnorm <= 1.5e-8 * std::max(1.0, gnorm0)) {
                res.iterations = it;
                return res;
            }
            throw LineSearchFailureError("minimize: Armijo search stalled");
        }
        res.energy_trace.push_back(ev.energy);
        res.iterations = it + 1;
    }
    return res;
}

// L2(inner) norm of DyW - div DzW at u, the strong-form optimality
// density. DzW is extended by zero outside omega, matching the
// compactly supported extension in the weak-to-strong passage.
inline double el_strong_residual(const EnergySpec& spec, const GridField& u,
                                 const StencilWeights& w, const DomainMasks& masks) {
    auto ev = var_detail::evaluate(spec, u, w, masks);
    GridField divq = nl_divergence(ev.dens_dz, w, masks.inner);
    GridField resid = GridField::zeros(u.grid, 1);
    for (std::size_t lin = 0; lin < u.grid.node_count(); ++lin)
        if (masks.inner[lin])
            resid.values[lin] = ev.dens_dy.values[lin] - divq.values[lin];
    return lp_norm(resid, masks.inner, 2.0);
}

inline double el_strong_residual(const EnergySpec& spec, const GridField& u,
                                 const RadialKernelTable& table, const DomainMasks& masks) {
    return el_strong_residual(spec, u, StencilWeights::build(u.grid, table), masks);
}

} // namespace nlc
