#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/grid.hpp"
#include "nlc/operators.hpp"
#include "nlc/quadrature.hpp"
#include "nlc/util.hpp"

namespace nlc {

enum class EnsembleFamily { bumps, random_trig_bumps };

// Random smooth test functions vanishing outside the inner domain: sums
// of 1-5 Gaussian-like bumps, hard-masked by a smooth plateau of the
// inner domain's signed distance (so membership in the zero-collar class
// holds exactly, not just approximately).
struct TestEnsemble {
    std::vector<GridField> members;
    std::uint64_t seed = 42;
    EnsembleFamily family = EnsembleFamily::bumps;

    static TestEnsemble generate(const GridSpec& grid, const OmegaShape& shape, double delta,
                                 int count, std::uint64_t seed,
                                 EnsembleFamily family = EnsembleFamily::bumps) {
        grid.validate();
        TestEnsemble ens;
        ens.seed = seed;
        ens.family = family;
        Rng rng(seed);

        // inradius of the inner domain
        double inr = std::numeric_limits<double>::infinity();
        for (int a = 0; a < grid.n; ++a) inr = std::min(inr, shape.axis_reach(a));
        inr -= delta;
        if (!(inr > 0.0)) throw EmptyInteriorError("TestEnsemble: inner domain empty");
        const double margin = 0.3 * inr;

        const std::size_t count_nodes = grid.node_count();
        for (int m = 0; m < count; ++m) {
            GridField f = GridField::zeros(grid, 1);
            const int bumps = rng.uniform_int(1, 5);
            std::vector<std::array<double, 5>> shapes; // cx, cy, width, amp, freq
            for (int b = 0; b < bumps; ++b) {
                double c[2] = {0.0, 0.0};
                for (int tries = 0; tries < 256; ++tries) {
                    for (int a = 0; a < grid.n; ++a)
                        c[a] = shape.center[a] +
                               rng.uniform(-shape.axis_reach(a), shape.axis_reach(a));
                    if (shape.signed_distance(c, grid.n) > delta + margin) break;
                }
                shapes.push_back({c[0], c[1], rng.uniform(0.25, 0.7) * inr,
                                  rng.uniform(0.4, 1.6) * (rng.uniform() < 0.5 ? -1.0 : 1.0),
                                  rng.uniform(2.0, 9.0)});
            }
            const double phase = rng.uniform(0.0, 2.0 * kPi);
            for (std::size_t lin = 0; lin < count_nodes; ++lin) {
                auto x = grid.point(lin);
                const double d = shape.signed_distance(x.data(), grid.n);
                if (d <= delta) continue; // outside the inner domain: exactly zero
                const double plateau = smooth_step((d - delta) / margin);
                double v = 0.0;
                for (auto& sb : shapes) {
                    const double r2 = (x[0] - sb[0]) * (x[0] - sb[0]) +
                                      (grid.n == 2 ? (x[1] - sb[1]) * (x[1] - sb[1]) : 0.0);
                    double bump = sb[3] * std::exp(-r2 / (sb[2] * sb[2]));
                    if (family == EnsembleFamily::random_trig_bumps)
                        bump *= 1.0 + 0.5 * std::sin(sb[4] * x[0] + phase);
                    v += bump;
                }
                f.values[lin] = plateau * v;
            }
            ens.members.push_back(std::move(f));
        }
        return ens;
    }
};

struct RatioReport {
    double max_ratio = 0.0;
    std::vector<double> ratios;
    double p = 0.0, q = 0.0, s = 0.0, delta = 0.0;
};

namespace ineq_detail {

inline double gradient_norm(const GridField& u, const StencilWeights& w, const DomainMasks& masks,
                            double p) {
    GridField du = nl_gradient(u, w, masks.omega);
    const double den = lp_norm(du, masks.omega, p);
    if (den < 1e-14) throw ZeroGradientError("ensemble member has vanishing nonlocal gradient");
    return den;
}

} // namespace ineq_detail

// max over members of |u|_{L^q(omega)} / |Du|_{L^p(omega)}.
inline RatioReport poincare_sobolev_ratio(const TestEnsemble& ens, double p, double q,
                                          const RadialKernelTable& table,
                                          const DomainMasks& masks) {
    const Params& par = table.params;
    if (!(p > 1.0)) throw ValidationError("poincare_sobolev_ratio: requires p > 1");
    if (!(par.s * p < par.n)) throw ValidationError("poincare_sobolev_ratio: requires s p < n");
    Params pq = par;
    pq.p = p;
    if (!(q >= 1.0 && q <= pq.sobolev_conjugate() + 1e-12))
        throw ValidationError("poincare_sobolev_ratio: q outside [1, p_s^*]");
    if (ens.members.empty()) throw ValidationError("poincare_sobolev_ratio: empty ensemble");

    StencilWeights w = StencilWeights::build(ens.members.front().grid, table);
    RatioReport rep;
    rep.p = p;
    rep.q = q;
    rep.s = par.s;
    rep.delta = par.delta;
    for (const auto& u : ens.members) {
        const double den = ineq_detail::gradient_norm(u, w, masks, p);
        rep.ratios.push_back(lp_norm(u, masks.omega, q) / den);
        rep.max_ratio = std::max(rep.max_ratio, rep.ratios.back());
    }
    return rep;
}

// q = p case, valid for every 1 < p.
inline RatioReport poincare_ratio(const TestEnsemble& ens, double p, const RadialKernelTable& table,
                                  const DomainMasks& masks) {
    if (!(p > 1.0)) throw ValidationError("poincare_ratio: requires p > 1");
    if (ens.members.empty()) throw ValidationError("poincare_ratio: empty ensemble");
    StencilWeights w = StencilWeights::build(ens.members.front().grid, table);
    RatioReport rep;
    rep.p = p;
    rep.q = p;
    rep.s = table.params.s;
    rep.delta = table.params.delta;
    for (const auto& u : ens.members) {
        const double den = ineq_detail::gradient_norm(u, w, masks, p);
        rep.ratios.push_back(lp_norm(u, masks.omega, p) / den);
        rep.max_ratio = std::max(rep.max_ratio, rep.ratios.back());
    }
    return rep;
}

// Hoelder-quotient and sup-norm ratios, s p > n. Pairs are sampled
// uniformly among omega nodes plus the max-|u| node against all sampled
// partners.
struct MorreyReport {
    RatioReport holder;
    double sup_ratio = 0.0;
};

inline MorreyReport morrey_ratio(const TestEnsemble& ens, double p, const RadialKernelTable& table,
                                 const DomainMasks& masks, int pairs = 200,
                                 std::uint64_t seed = 42) {
    const Params& par = table.params;
    if (!(p > 1.0 && par.s * p > par.n)) throw ValidationError("morrey_ratio: requires s p > n");
    if (ens.members.empty()) throw ValidationError("morrey_ratio: empty ensemble");
    const GridSpec& grid = ens.members.front().grid;
    StencilWeights w = StencilWeights::build(grid, table);
    const double expo = par.s - static_cast<double>(par.n) / p;

    std::vector<std::size_t> omega_nodes;
    for (std::size_t lin = 0; lin < grid.node_count(); ++lin)
        if (masks.omega[lin]) omega_nodes.push_back(lin);

    MorreyReport rep;
    rep.holder.p = p;
    rep.holder.s = par.s;
    rep.holder.delta = par.delta;
    Rng rng(seed);
    for (const auto& u : ens.members) {
        const double den = ineq_detail::gradient_norm(u, w, masks, p);
        std::size_t peak = omega_nodes.front();
        for (std::size_t lin : omega_nodes)
            if (std::abs(u.values[lin]) > std::abs(u.values[peak])) peak = lin;
        double worst = 0.0;
        auto quotient = [&](std::size_t a, std::size_t b) {
            if (a == b) return; // 0/0 pairs are skipped
            auto xa = grid.point(a), xb = grid.point(b);
            const double dist = std::hypot(xa[0] - xb[0], xa[1] - xb[1]);
            worst = std::max(worst, std::abs(u.values[a] - u.values[b]) /
                                        (std::pow(dist, expo) * den));
        };
        for (int t = 0; t < pairs; ++t) {
            std::size_t a = omega_nodes[rng.next_u64() % omega_nodes.size()];
            std::size_t b = omega_nodes[rng.next_u64() % omega_nodes.size()];
            quotient(a, b);
            quotient(peak, a);
        }
        rep.holder.ratios.push_back(worst);
        rep.holder.max_ratio = std::max(rep.holder.max_ratio, worst);
        rep.sup_ratio = std::max(rep.sup_ratio, lp_norm(u, masks.omega,
                                                        std::numeric_limits<double>::infinity()) /
                                                    den);
    }
    return rep;
}

// Exponential-integrability scan at the conformal exponent s p = n:
// for each candidate c1 report max over members of
//   (1/|omega|) int_omega exp((|u| / (c1 |Du|_p))^{p'}) dx,
// and the smallest candidate keeping it under the cap.
struct TrudingerReport {
    std::vector<double> c1_grid;
    std::vector<double> worst_value; // per candidate
    double c1_selected = 0.0;        // 0 when no candidate passes
    double c2_cap = 0.0;
};

inline TrudingerReport trudinger_check(const TestEnsemble& ens, double p,
                                       const RadialKernelTable& table, const DomainMasks& masks,
                                       const std::vector<double>& c1_grid, double c2_cap = 2.0) {
    const Params& par = table.params;
    if (std::abs(par.s * p - par.n) > 1e-9)
        throw ValidationError("trudinger_check: requires s p = n");
    if (ens.members.empty() || c1_grid.empty())
        throw ValidationError("trudinger_check: empty inputs");
    const GridSpec& grid = ens.members.front().grid;
    StencilWeights w = StencilWeights::build(grid, table);
    const double pp = p / (p - 1.0);

    TrudingerReport rep;
    rep.c1_grid = c1_grid;
    rep.c2_cap = c2_cap;
    std::vector<double> dens;
    for (const auto& u : ens.members) dens.push_back(ineq_detail::gradient_norm(u, w, masks, p));

    for (double c1 : c1_grid) {
        double worst = 0.0;
        for (std::size_t m = 0; m < ens.members.size(); ++m) {
            const auto& u = ens.members[m];
            std::vector<double> terms;
            terms.reserve(masks.omega_count);
            for (std::size_t lin = 0; lin < grid.node_count(); ++lin) {
                if (!masks.omega[lin]) continue;
                terms.push_back(std::exp(std::pow(std::abs(u.values[lin]) / (c1 * dens[m]), pp)));
            }
            const double value = block_sum(terms) / static_cast<double>(masks.omega_count);
            worst = std::max(worst, value);
        }
        rep.worst_value.push_back(worst);
        if (rep.c1_selected == 0.0 && worst <= c2_cap) rep.c1_selected = c1;
    }
    return rep;
}

// Weighted-norm ratio with the |x|^{-sp} Hardy weight; the origin cell is
// integrated radially over the equal-volume ball.
inline RatioReport hardy_ratio(const TestEnsemble& ens, double p, const RadialKernelTable& table,
                               const DomainMasks& masks) {
    const Params& par = table.params;
    if (!(p > 1.0 && par.s * p < par.n)) throw ValidationError("hardy_ratio: requires s p < n");
    if (ens.members.empty()) throw ValidationError("hardy_ratio: empty ensemble");
    const GridSpec& grid = ens.members.front().grid;
    StencilWeights w = StencilWeights::build(grid, table);
    const double sp = par.s * p;
    const double h = grid.h();
    const double rc = grid.n == 1 ? 0.5 * h : h / std::sqrt(kPi);

    // origin must lie inside omega
    bool origin_inside = false;
    for (std::size_t lin = 0; lin < grid.node_count(); ++lin) {
        auto x = grid.point(lin);
        if (masks.omega[lin] && detail::point_norm(x.data(), grid.n) < 0.5 * h)
            origin_inside = true;
    }
    if (!origin_inside) throw ValidationError("hardy_ratio: origin not inside omega");

    RatioReport rep;
    rep.p = p;
    rep.s = par.s;
    rep.delta = par.delta;
    for (const auto& u : ens.members) {
        const double den = ineq_detail::gradient_norm(u, w, masks, p);
        std::vector<double> terms;
        terms.reserve(masks.omega_count);
        for (std::size_t lin = 0; lin < grid.node_count(); ++lin) {
            if (!masks.omega[lin]) continue;
            auto x = grid.point(lin);
            const double r = detail::point_norm(x.data(), grid.n);
            double weight;
            if (r < 0.5 * h) {
                // cell average of |x|^{-sp} over the equal-volume ball
                weight = sphere_area(grid.n) * std::pow(rc, grid.n - sp) /
                         ((grid.n - sp) * grid.cell_volume());
            } else {
                weight = std::pow(r, -sp);
            }
            terms.push_back(weight * std::pow(std::abs(u.values[lin]), p));
        }
        const double num = std::pow(grid.cell_volume() * block_sum(terms), 1.0 / p);
        rep.ratios.push_back(num / den);
        rep.max_ratio = std::max(rep.max_ratio, rep.ratios.back());
    }
    return rep;
}

// Least-squares slope of log |tau_h u - u|_{L^p(omega)} against log |h|
// over whole-cell shifts along the first axis.
inline double translation_exponent(const GridField& u, double p, const RadialKernelTable& table,
                                   const DomainMasks& masks, const std::vector<int>& shifts) {
    const GridSpec& grid = u.grid;
    if (shifts.size() < 2) throw ValidationError("translation_exponent: need several shifts");
    StencilWeights w = StencilWeights::build(grid, table);
    const double den = ineq_detail::gradient_norm(u, w, masks, p);
    (void)den;
    std::vector<double> lx, ly;
    const std::ptrdiff_t row = grid.n == 1 ? 1 : grid.cells;
    for (int m : shifts) {
        if (m == 0) continue;
        GridField diff = GridField::zeros(grid, 1);
        for (std::size_t lin = 0; lin < grid.node_count(); ++lin) {
            if (!masks.omega[lin]) continue;
            const auto shifted = static_cast<std::ptrdiff_t>(lin) + m * row;
            if (shifted < 0 || shifted >= static_cast<std::ptrdiff_t>(grid.node_count()))
                throw StencilOverflowError("translation_exponent: shift exits the grid");
            diff.values[lin] = u.values[static_cast<std::size_t>(shifted)] - u.values[lin];
        }
        lx.push_back(std::log(m * grid.h()));
        ly.push_back(std::log(lp_norm(diff, masks.omega, p) + 1e-300));
    }
    return fit_slope(lx, ly);
}

// L1 modulus of the vector Riesz-type kernel under translation,
//   L(h) = int | z/|z|^{n+1-s} - (z-h)/|z-h|^{n+1-s} | dz,
// by adaptive quadrature on B(0, R) plus the first-order analytic tail.
struct HolderKernelRow {
    double s = 0.0, h = 0.0, lhs = 0.0, scaled = 0.0; // scaled = lhs s(1-s)/h^s
};

inline double holder_kernel_lhs(int n, double s, double h, double R = 0.0) {
    if (!(h > 0.0)) throw ValidationError("holder_kernel_lhs: h must be positive");
    if (R <= 0.0) R = (n == 1 ? 80.0 : 30.0) * h;
    const double q = n + 1 - s;
    auto G = [&](double z0, double z1, int axis) {
        const double r = std::hypot(z0, z1);
        return (axis == 0 ? z0 : z1) / std::pow(r, q);
    };
    auto f = [&](double z0, double z1) {
        const double dx = G(z0, z1, 0) - G(z0 - h, z1, 0);
        if (n == 1) return std::abs(dx);
        const double dy = G(z0, z1, 1) - G(z0 - h, z1, 1);
        return std::hypot(dx, dy);
    };
    double value = 0.0;
    if (n == 1) {
        // four segments with a power-law substitution at each singular
        // endpoint (z = 0 and z = h, |f| ~ t^{s-1} there). Both kernel
        // arguments are formed directly from the distance t to the
        // singular point; reconstructing the small one as z - h would
        // cancel catastrophically.
        auto G1 = [&](double z) { return z / std::pow(std::abs(z), q); };
        auto seg = [&](auto&& pair, double length) {
            auto g = [&](double t) {
                auto [z, zmh] = pair(t);
                return std::abs(G1(z) - G1(zmh)) * std::pow(t, 1.0 - s);
            };
            return integrate_power_endpoint(g, 1.0 - s, length, 1e-9);
        };
        value += seg([&](double t) { return std::pair{-t, -t - h}; }, R);
        value += seg([&](double t) { return std::pair{t, t - h}; }, 0.5 * h);
        value += seg([&](double t) { return std::pair{h - t, -t}; }, 0.5 * h);
        value += seg([&](double t) { return std::pair{h + t, t}; }, R);
    } else {
        // polar decomposition: a radius-h/2 ball around each singular
        // point (the singular kernel factor cancels algebraically), the
        // smooth remainder about the midpoint c = h/2 e1, where the two
        // excluded balls show up as r_min(theta) = h |cos theta|.
        const int mth = 512;
        auto ball = [&](bool at_origin) {
            double acc = 0.0;
            for (int i = 0; i < mth; ++i) {
                const double th = 2.0 * kPi * (i + 0.5) / mth;
                const double e0 = std::cos(th), e1v = std::sin(th);
                auto g = [&](double r) {
                    // r^{2-s} G(r e) = e exactly; the other pole is h/2 away
                    const double rs = std::pow(r, 2.0 - s);
                    double gx, gy;
                    if (at_origin) {
                        gx = e0 - rs * G(r * e0 - h, r * e1v, 0);
                        gy = e1v - rs * G(r * e0 - h, r * e1v, 1);
                    } else {
                        gx = rs * G(h + r * e0, r * e1v, 0) - e0;
                        gy = rs * G(h + r * e0, r * e1v, 1) - e1v;
                    }
                    return std::hypot(gx, gy);
                };
                // int f r dr = int g(r) r^{s-1} dr over (0, h/2)
                acc += integrate_power_endpoint(g, 1.0 - s, 0.5 * h, 1e-10);
            }
            return acc * (2.0 * kPi / mth);
        };
        value += ball(true) + ball(false);

        for (int i = 0; i < mth; ++i) {
            const double th = 2.0 * kPi * (i + 0.5) / mth;
            const double e0 = std::cos(th), e1v = std::sin(th);
            const double rmin = h * std::abs(e0);
            auto g = [&](double r) {
                const double z0 = 0.5 * h + r * e0;
                const double z1 = r * e1v;
                return f(z0, z1) * r;
            };
            value += integrate(g, rmin, R, 1e-9) * (2.0 * kPi / mth);
        }
    }
    if (n == 1) {
        // the one-sided tails telescope exactly:
        // int_R^inf [G(z-h) - G(z)] dz = int_{R-h}^R t^{s-1} dt, twice
        value += 2.0 * (std::pow(R, s) - std::pow(R - h, s)) / s;
    } else {
        // first-order tail: h int_{|z|>R} |d G/d e1| dz with the angular
        // factor integrated numerically
        const int m = 512;
        double ang = 0.0;
        for (int i = 0; i < m; ++i) {
            const double c2 = std::cos(2.0 * kPi * i / m) * std::cos(2.0 * kPi * i / m);
            ang += std::sqrt(1.0 + (3.0 - s) * (1.0 - s) * c2);
        }
        ang *= 2.0 * kPi / m;
        value += h * ang * std::pow(R, -(1.0 - s)) / (1.0 - s);
    }
    return value;
}

inline std::vector<HolderKernelRow> holder_kernel_bound(int n, const std::vector<double>& s_list,
                                                        const std::vector<double>& h_list) {
    std::vector<HolderKernelRow> rows;
    const double hmax = *std::max_element(h_list.begin(), h_list.end());
    for (double s : s_list) {
        for (double h : h_list) {
            HolderKernelRow row;
            row.s = s;
            row.h = h;
            row.lhs = holder_kernel_lhs(n, s, h, (n == 1 ? 80.0 : 30.0) * hmax);
            row.scaled = row.lhs * s * (1.0 - s) / std::pow(h, s);
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace nlc
