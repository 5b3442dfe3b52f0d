#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlc/bumps.hpp"
#include "nlc/variational.hpp"
#include "oracles.hpp"

using namespace nlc;

namespace {

struct Problem {
    GridSpec grid;
    OmegaShape shape;
    RadialKernelTable table;
    DomainMasks masks;
    StencilWeights weights;
};

Problem make_problem(int cells = 64) {
    Params p;
    p.n = 1;
    p.s = 0.5;
    p.delta = 0.25;
    CutoffProfile c;
    c.delta = p.delta;
    auto table = RadialKernelTable::build(p, c);
    GridSpec grid{1, -1.0, 1.0, cells};
    auto shape = OmegaShape::make_box({0.0, 0.0}, {0.5, 0.5});
    auto masks = make_masks(grid, shape, p.delta);
    auto w = StencilWeights::build(grid, table);
    return {grid, shape, table, masks, w};
}

EnergySpec quadratic_spec(std::function<double(const double*)> source = nullptr) {
    EnergySpec spec;
    spec.W = [source](const double* x, double y, const double* z) {
        double v = 0.5 * z[0] * z[0];
        if (source) v -= source(x) * y;
        return v;
    };
    spec.DyW = [source](const double* x, double, const double*) {
        return source ? -source(x) : 0.0;
    };
    spec.DzW = [](const double*, double, const double* z, double* out) { out[0] = z[0]; };
    return spec;
}

EnergySpec plaplace_spec(double p) {
    EnergySpec spec;
    spec.W = [p](const double*, double, const double* z) {
        return std::pow(std::abs(z[0]), p) / p;
    };
    spec.DyW = [](const double*, double, const double*) { return 0.0; };
    spec.DzW = [p](const double*, double, const double* z, double* out) {
        out[0] = std::pow(std::abs(z[0]), p - 2.0) * z[0];
    };
    spec.coercivity_p = p;
    return spec;
}

double bump_source(const double* x) { return bump_smooth(std::abs(x[0] + 0.03), 0.35); }

// dense free-node system h (D^T D) u = h f via the energy gradient of
// basis vectors, solved by conjugate gradients
GridField cg_oracle_solution(const Problem& pb, const std::function<double(const double*)>& f) {
    std::vector<std::size_t> free_nodes;
    for (std::size_t lin = 0; lin < pb.grid.node_count(); ++lin)
        if (pb.masks.inner[lin]) free_nodes.push_back(lin);
    const std::size_t m = free_nodes.size();

    EnergySpec hom = quadratic_spec(); // source-free quadratic for the Hessian
    std::vector<std::vector<double>> A(m, std::vector<double>(m, 0.0));
    for (std::size_t j = 0; j < m; ++j) {
        GridField e = GridField::zeros(pb.grid, 1);
        e.values[free_nodes[j]] = 1.0;
        auto ev = var_detail::evaluate(hom, e, pb.weights, pb.masks);
        GridField col = energy_gradient_field(ev, pb.weights, pb.masks);
        for (std::size_t i = 0; i < m; ++i) A[i][j] = col.values[free_nodes[i]];
    }
    std::vector<double> b(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto x = pb.grid.point(free_nodes[i]);
        b[i] = pb.grid.cell_volume() * f(x.data());
    }
    auto sol = oracle::cg_solve(A, b, 1e-14);
    GridField u = GridField::zeros(pb.grid, 1);
    for (std::size_t i = 0; i < m; ++i) u.values[free_nodes[i]] = sol[i];
    return u;
}

} // namespace

TEST_CASE("energy spec validation") {
    auto pb = make_problem();
    auto spec = quadratic_spec(bump_source);
    validate_energy_spec(spec, 1);

    auto broken = spec;
    broken.DzW = [](const double*, double, const double* z, double* out) { out[0] = 2.5 * z[0]; };
    CHECK_THROWS_AS(validate_energy_spec(broken, 1), ValidationError);

    EnergySpec nonconvex = quadratic_spec();
    nonconvex.W = [](const double*, double, const double* z) { return -z[0] * z[0]; };
    nonconvex.DyW = [](const double*, double, const double*) { return 0.0; };
    nonconvex.DzW = [](const double*, double, const double* z, double* out) { out[0] = -2.0 * z[0]; };
    nonconvex.convex_in_z = true; // declared convex, is not
    CHECK_THROWS_AS(validate_energy_spec(nonconvex, 1), ValidationError);
    (void)pb;
}

TEST_CASE("energy of constants and of bumps") {
    auto pb = make_problem(128);
    auto spec = quadratic_spec();

    GridField cst = GridField::sample(pb.grid, [](const double*) { return 2.25; });
    CHECK(energy_eval(spec, cst, pb.weights, pb.masks) == 0.0);

    GridField u = GridField::sample(pb.grid, [](const double* x) { return bump_smooth(std::abs(x[0]), 0.4); });
    GridField du = nl_gradient(u, pb.weights, pb.masks.omega);
    const double expected = 0.5 * std::pow(lp_norm(du, pb.masks.omega, 2.0), 2.0);
    CHECK(energy_eval(spec, u, pb.weights, pb.masks) == doctest::Approx(expected).epsilon(1e-12));

    // quadratic-with-source energy against the assembled-operator form
    auto pb64 = make_problem(64);
    auto specf = quadratic_spec(bump_source);
    GridField v = GridField::zeros(pb64.grid, 1);
    Rng rng(3);
    for (std::size_t lin = 0; lin < pb64.grid.node_count(); ++lin)
        if (pb64.masks.inner[lin]) v.values[lin] = rng.uniform(-1.0, 1.0);
    // 1/2 v^T A v - b^T v with the dense assembly
    std::vector<std::size_t> free_nodes;
    for (std::size_t lin = 0; lin < pb64.grid.node_count(); ++lin)
        if (pb64.masks.inner[lin]) free_nodes.push_back(lin);
    EnergySpec hom = quadratic_spec();
    double quad = 0.0;
    {
        auto ev = var_detail::evaluate(hom, v, pb64.weights, pb64.masks);
        GridField av = energy_gradient_field(ev, pb64.weights, pb64.masks);
        for (auto lin : free_nodes) quad += 0.5 * av.values[lin] * v.values[lin];
        for (auto lin : free_nodes) {
            auto x = pb64.grid.point(lin);
            quad -= pb64.grid.cell_volume() * bump_source(x.data()) * v.values[lin];
        }
    }
    // the source also pairs with omega nodes outside the free set (zero here)
    CHECK(energy_eval(specf, v, pb64.weights, pb64.masks) ==
          doctest::Approx(quad).epsilon(1e-8));
}

TEST_CASE("first variation matches central differences and is linear") {
    auto pb = make_problem(128);
    auto spec = quadratic_spec(bump_source);
    GridField u = GridField::sample(pb.grid, [](const double* x) { return bump_poly(std::abs(x[0] - 0.04), 0.3); });

    GridField zero_phi = GridField::zeros(pb.grid, 1);
    CHECK(energy_first_variation(spec, u, zero_phi, pb.weights, pb.masks) == 0.0);

    GridField phi = GridField::sample(pb.grid, [](const double* x) { return bump_smooth(std::abs(x[0] + 0.02), 0.2); });
    for (std::size_t lin = 0; lin < pb.grid.node_count(); ++lin)
        if (!pb.masks.inner[lin]) phi.values[lin] = 0.0;

    const double fv = energy_first_variation(spec, u, phi, pb.weights, pb.masks);
    const double t = 1e-5;
    GridField up = u, um = u;
    for (std::size_t lin = 0; lin < pb.grid.node_count(); ++lin) {
        up.values[lin] += t * phi.values[lin];
        um.values[lin] -= t * phi.values[lin];
    }
    const double fd = (energy_eval(spec, up, pb.weights, pb.masks) -
                       energy_eval(spec, um, pb.weights, pb.masks)) /
                      (2.0 * t);
    CHECK(std::abs(fv - fd) <= 1e-6);

    // linearity in phi
    GridField phi2 = phi;
    for (auto& v : phi2.values) v *= -3.5;
    const double fv2 = energy_first_variation(spec, u, phi2, pb.weights, pb.masks);
    CHECK(fv2 == doctest::Approx(-3.5 * fv).epsilon(1e-12));
}

TEST_CASE("quadratic minimization: trivial and oracle-checked") {
    auto pb = make_problem(64);

    // no source, zero datum: the zero field is already optimal
    MinimizeConfig cfg;
    cfg.datum = GridField::zeros(pb.grid, 1);
    cfg.tolerance = 1e-8;
    auto res0 = minimize(quadratic_spec(), cfg, pb.masks, pb.table);
    CHECK(res0.converged);
    for (double v : res0.u.values) CHECK(v == 0.0);

    // bump source against the dense CG solve
    auto spec = quadratic_spec(bump_source);
    auto res = minimize(spec, cfg, pb.masks, pb.table);
    CHECK(res.converged);
    for (std::size_t i = 1; i < res.energy_trace.size(); ++i)
        CHECK(res.energy_trace[i] <= res.energy_trace[i - 1] + 1e-15);

    GridField oracle_u = cg_oracle_solution(pb, bump_source);
    double num = 0.0, den = 0.0;
    for (std::size_t lin = 0; lin < pb.grid.node_count(); ++lin) {
        num += (res.u.values[lin] - oracle_u.values[lin]) * (res.u.values[lin] - oracle_u.values[lin]);
        den += oracle_u.values[lin] * oracle_u.values[lin];
    }
    CHECK(std::sqrt(num / den) <= 1e-6);

    // weak and strong optimality at the oracle solution
    GridField phi = GridField::zeros(pb.grid, 1);
    Rng rng(11);
    for (std::size_t lin = 0; lin < pb.grid.node_count(); ++lin)
        if (pb.masks.inner[lin]) phi.values[lin] = rng.uniform(-1.0, 1.0);
    const double weak = energy_first_variation(spec, oracle_u, phi, pb.weights, pb.masks);
    CHECK(std::abs(weak) <= 1e-8);
    CHECK(el_strong_residual(spec, oracle_u, pb.weights, pb.masks) <= 1e-7);

    // zero source, zero field: strong residual identically zero
    CHECK(el_strong_residual(quadratic_spec(), GridField::zeros(pb.grid, 1), pb.weights,
                             pb.masks) == 0.0);
}

TEST_CASE("heavy-ball momentum reaches the same minimizer") {
    auto pb = make_problem(64);
    auto spec = quadratic_spec(bump_source);
    MinimizeConfig cfg;
    cfg.datum = GridField::zeros(pb.grid, 1);
    cfg.tolerance = 1e-8;
    auto plain = minimize(spec, cfg, pb.masks, pb.table);
    cfg.momentum = 0.7;
    auto heavy = minimize(spec, cfg, pb.masks, pb.table);
    CHECK(heavy.converged);
    for (std::size_t i = 1; i < heavy.energy_trace.size(); ++i)
        CHECK(heavy.energy_trace[i] <= heavy.energy_trace[i - 1] + 1e-15);
    double diff = 0.0, scale = 0.0;
    for (std::size_t lin = 0; lin < pb.grid.node_count(); ++lin) {
        diff = std::max(diff, std::abs(heavy.u.values[lin] - plain.u.values[lin]));
        scale = std::max(scale, std::abs(plain.u.values[lin]));
    }
    CHECK(diff <= 1e-5 * scale);
}

TEST_CASE("p-laplace energy with a linear datum converges monotonically") {
    auto pb = make_problem(64);
    auto spec = plaplace_spec(4.0);
    validate_energy_spec(spec, 1);

    MinimizeConfig cfg;
    cfg.datum = GridField::sample(pb.grid, [](const double* x) { return 0.5 * x[0]; });
    cfg.tolerance = 1e-8;
    auto res = minimize(spec, cfg, pb.masks, pb.table);
    CHECK(res.converged);
    for (std::size_t i = 1; i < res.energy_trace.size(); ++i)
        CHECK(res.energy_trace[i] <= res.energy_trace[i - 1] + 1e-15);
    // datum preserved on the constrained nodes
    for (std::size_t lin = 0; lin < pb.grid.node_count(); ++lin)
        if (!pb.masks.inner[lin])
            CHECK(res.u.values[lin] == cfg.datum.values[lin]);
    CHECK(res.first_variation_norm <= cfg.tolerance * std::max(1.0, 1.0));
}

TEST_CASE("non-finite integrands and stalled searches are reported") {
    auto pb = make_problem(64);
    EnergySpec bad = quadratic_spec();
    bad.W = [](const double*, double, const double*) {
        return std::numeric_limits<double>::infinity();
    };
    GridField u = GridField::zeros(pb.grid, 1);
    CHECK_THROWS_AS(energy_eval(bad, u, pb.weights, pb.masks), NonFiniteError);

    // a deliberately inconsistent derivative: the search direction climbs
    EnergySpec lying = quadratic_spec();
    lying.DzW = [](const double*, double, const double* z, double* out) { out[0] = -z[0]; };
    MinimizeConfig cfg;
    cfg.datum = GridField::sample(pb.grid, [](const double* x) { return x[0] * x[0] + 0.2 * x[0]; });
    CHECK_THROWS_AS(minimize(lying, cfg, pb.masks, pb.table), LineSearchFailureError);
}
