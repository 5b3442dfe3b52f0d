// nlcalc: command-line front end for the nonlocal-calculus library.
// Subcommands: kernel, grad, ibp-check, vkernel, ftc-check, ineq, minimize.
// Exit codes: 0 ok, 1 invariant failure, 2 usage error, 3 validation error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "nlc/bumps.hpp"
#include "nlc/field_io.hpp"
#include "nlc/ftc.hpp"
#include "nlc/inequalities.hpp"
#include "nlc/operators.hpp"
#include "nlc/spectral.hpp"
#include "nlc/variational.hpp"

using namespace nlc;

namespace {

struct CommonOpts {
    int n = 1;
    double s = 0.5;
    double delta = 0.25;
    double a0 = 1.0;
    double b0 = 0.5;
    std::uint64_t seed = 42;
    bool normalize_rho = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_n = true) {
    if (with_n) cmd->add_option("--n", opts.n, "spatial dimension (1 or 2)");
    cmd->add_option("--s", opts.s, "fractional order in (0,1)");
    cmd->add_option("--delta", opts.delta, "horizon length");
    cmd->add_option("--a0", opts.a0, "cut-off plateau height");
    cmd->add_option("--b0", opts.b0, "cut-off plateau fraction");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_flag("--normalize-rho", opts.normalize_rho, "rescale a0 to unit kernel mass");
}

RadialKernelTable build_table(const CommonOpts& opts) {
    Params p;
    p.n = opts.n;
    p.s = opts.s;
    p.delta = opts.delta;
    CutoffProfile c;
    c.a0 = opts.a0;
    c.b0 = opts.b0;
    c.delta = opts.delta;
    return RadialKernelTable::build(p, c, 4096, opts.normalize_rho);
}

std::vector<std::pair<std::string, std::string>> stamp(const std::string& cmd,
                                                       const CommonOpts& o) {
    auto f = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    return {{"cmd", cmd},          {"n", std::to_string(o.n)}, {"s", f(o.s)},
            {"delta", f(o.delta)}, {"a0", f(o.a0)},            {"b0", f(o.b0)},
            {"seed", std::to_string(o.seed)}};
}

GridSpec sym_grid(int n, int cells, double half) {
    return GridSpec{n, -half, half, cells};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run_kernel(const CommonOpts& opts, int samples, const std::string& out) {
    auto table = build_table(opts);
    CsvWriter csv(out);
    for (auto& [k, v] : stamp("kernel", opts)) csv.comment(k, v);
    csv.header({"r", "wbar", "qbar", "Qbar"});
    for (int i = 1; i <= samples; ++i) {
        const double r = opts.delta * i / samples;
        csv.row({r, table.cutoff(r), table.qbar(r), table.Qbar(r)});
    }
    return 0;
}

void write_field(const GridField& f, const std::string& path, const std::string& format,
                 const CommonOpts& opts, const std::string& cmd) {
    if (format == "csv")
        write_field_csv(f, path, stamp(cmd, opts));
    else
        write_nlf(f, path);
}

int run_grad(const CommonOpts& opts_in, const std::string& in, const std::string& out, double lo,
             double hi, const std::string& format) {
    GridField u = read_nlf(in, lo, hi);
    CommonOpts opts = opts_in;
    opts.n = u.grid.n;
    auto table = build_table(opts);
    GridField g = nl_gradient(u, OperatorConfig{table}, interior_mask(u.grid, opts.delta));
    write_field(g, out, format, opts, "grad");
    return 0;
}

int run_ibp_check(const CommonOpts& opts, const std::vector<int>& refine, const std::string& out) {
    CsvWriter csv(out);
    for (auto& [k, v] : stamp("ibp-check", opts)) csv.comment(k, v);
    csv.header({"N", "h", "grad_pairing", "div_pairing", "collar_term", "residual"});
    auto table = build_table(opts);
    auto shape = OmegaShape::make_box({0.0, 0.0}, {0.5, 0.5});
    for (int cells : refine) {
        GridSpec grid = sym_grid(opts.n, cells, 1.0);
        auto masks = make_masks(grid, shape, opts.delta);
        StencilWeights w = StencilWeights::build(grid, table);
        GridField u = GridField::sample(grid, [](const double* x) {
            return std::cos(2.0 * x[0] + 0.3) + (x[1] != 0.0 ? 0.5 * std::sin(x[1]) : 0.0);
        });
        GridField phi = GridField::zeros(grid, grid.n);
        for (std::size_t lin = 0; lin < grid.node_count(); ++lin) {
            auto x = grid.point(lin);
            const double r = std::hypot(x[0] - 0.05, x[1]);
            for (int a = 0; a < grid.n; ++a) phi.at(lin, a) = bump_poly(r, 0.4);
        }
        auto terms = ibp_terms(u, phi, w, masks);
        csv.row({static_cast<double>(cells), grid.h(), terms.grad_pairing, terms.div_pairing,
                 terms.collar_term, terms.residual()});
    }
    return 0;
}

int run_vkernel(const CommonOpts& opts, int cells, int pad, const std::string& out,
                const std::string& report, bool inject_negative) {
    auto table = build_table(opts);
    GridSpec grid = sym_grid(opts.n, cells, pad * opts.delta);
    SpectralField qh = qhat(table, grid);
    if (inject_negative) qh.modes[grid.node_count() / 3] = cplx(-1.0, 0.0);
    const double qmin = qhat_min_real(qh);

    auto vk = v_kernel(qh, table.params, table.cutoff); // throws NonpositiveQhat on bad modes
    const double nyq = qh.nyquist();
    const double tail = qhat_tail_ratio(qh, table.params, {0.75 * nyq}).front();
    const double slope = v_decay_slope(vk.V, opts.delta / 64.0, opts.delta / 4.0);
    const double resid = conv_identity_residual(vk, table, 0.5 * opts.delta, 2.0 * opts.delta);

    if (!out.empty()) write_nlf(vk.V, out);
    if (!report.empty()) {
        CsvWriter csv(report);
        for (auto& [k, v] : stamp("vkernel", opts)) csv.comment(k, v);
        csv.comment("N", std::to_string(cells));
        csv.comment("pad", std::to_string(pad));
        csv.header({"qhat_min", "tail_ratio", "decay_slope", "w_sup", "conv_residual"});
        csv.row({qmin, tail, slope, vk.w_sup, resid});
    }
    return 0;
}

int run_ftc_check(const CommonOpts& opts, int cells, int pad, const std::string& bump,
                  const std::string& out) {
    auto table = build_table(opts);
    const double half = 0.25 * pad;
    const double radius = 0.5 * half - opts.delta - 0.02;
    if (radius <= 0.0) throw ValidationError("ftc-check: pad too small for the horizon");
    auto profile = [&](const double* x) {
        const double r = std::hypot(x[0], x[1]);
        return bump == "poly" ? bump_poly(r, radius) : bump_gauss(r, 0.45 * radius, radius);
    };
    CsvWriter csv(out);
    for (auto& [k, v] : stamp("ftc-check", opts)) csv.comment(k, v);
    csv.comment("pad", std::to_string(pad));
    csv.comment("bump", bump);
    csv.header({"N", "rel_l2", "rel_linf"});
    for (int c : {cells, 2 * cells}) {
        GridSpec grid = sym_grid(opts.n, c, half);
        GridField u = GridField::sample(grid, profile);
        auto vk = v_kernel(qhat(table, grid), table.params, table.cutoff);
        auto rep = ftc_roundtrip_report(u, table, vk);
        csv.row({static_cast<double>(c), rep.rel_l2_error, rep.rel_linf_error});
    }
    return 0;
}

int run_ineq(const CommonOpts& opts, const std::string& which, double p, double q, int members,
             int cells, const std::string& out) {
    auto table = build_table(opts);
    GridSpec grid = sym_grid(opts.n, cells, 1.0);
    auto shape = OmegaShape::make_box({0.0, 0.0}, {0.5, 0.5});
    auto masks = make_masks(grid, shape, opts.delta);
    auto ens = TestEnsemble::generate(grid, shape, opts.delta, members, opts.seed);

    CsvWriter csv(out);
    for (auto& [k, v] : stamp("ineq-" + which, opts)) csv.comment(k, v);
    csv.comment("p", std::to_string(p));
    csv.comment("members", std::to_string(members));
    csv.comment("N", std::to_string(cells));

    if (which == "poincare") {
        auto rep = poincare_ratio(ens, p, table, masks);
        csv.comment("max_ratio", fmt(rep.max_ratio));
        csv.header({"member", "ratio"});
        for (std::size_t i = 0; i < rep.ratios.size(); ++i)
            csv.row({static_cast<double>(i), rep.ratios[i]});
    } else if (which == "sobolev") {
        Params pp = table.params;
        pp.p = p;
        if (q <= 0.0) q = pp.sobolev_conjugate();
        auto rep = poincare_sobolev_ratio(ens, p, q, table, masks);
        csv.comment("q", fmt(q));
        csv.comment("max_ratio", fmt(rep.max_ratio));
        csv.header({"member", "ratio"});
        for (std::size_t i = 0; i < rep.ratios.size(); ++i)
            csv.row({static_cast<double>(i), rep.ratios[i]});
    } else if (which == "morrey") {
        auto rep = morrey_ratio(ens, p, table, masks, 200, opts.seed);
        csv.comment("sup_ratio", fmt(rep.sup_ratio));
        csv.comment("max_ratio", fmt(rep.holder.max_ratio));
        csv.header({"member", "holder_ratio"});
        for (std::size_t i = 0; i < rep.holder.ratios.size(); ++i)
            csv.row({static_cast<double>(i), rep.holder.ratios[i]});
    } else if (which == "trudinger") {
        std::vector<double> c1_grid;
        for (double c1 = 0.05; c1 <= 4.0; c1 *= 1.25) c1_grid.push_back(c1);
        auto rep = trudinger_check(ens, p, table, masks, c1_grid);
        csv.comment("c1_selected", fmt(rep.c1_selected));
        csv.header({"c1", "worst_value"});
        for (std::size_t i = 0; i < c1_grid.size(); ++i)
            csv.row({c1_grid[i], rep.worst_value[i]});
    } else if (which == "hardy") {
        auto rep = hardy_ratio(ens, p, table, masks);
        csv.comment("max_ratio", fmt(rep.max_ratio));
        csv.header({"member", "ratio"});
        for (std::size_t i = 0; i < rep.ratios.size(); ++i)
            csv.row({static_cast<double>(i), rep.ratios[i]});
    } else if (which == "translation") {
        std::vector<int> shifts;
        for (int m = 2; m <= 20; m += 2) shifts.push_back(m);
        csv.header({"member", "slope"});
        for (std::size_t i = 0; i < ens.members.size(); ++i)
            csv.row({static_cast<double>(i),
                     translation_exponent(ens.members[i], p, table, masks, shifts)});
    } else {
        throw CLI::ValidationError("ineq", "unknown inequality '" + which + "'");
    }
    return 0;
}

int run_minimize(const CommonOpts& opts, const std::string& energy, double p, int cells,
                 const std::string& source_path, const std::string& datum_path, double tol,
                 const std::string& out, const std::string& trace, const std::string& format) {
    auto table = build_table(opts);
    GridSpec grid = sym_grid(opts.n, cells, 1.0);
    auto shape = OmegaShape::make_box({0.0, 0.0}, {0.5, 0.5});
    auto masks = make_masks(grid, shape, opts.delta);

    GridField source =
        source_path.empty()
            ? GridField::sample(grid,
                                [](const double* x) {
                                    return bump_smooth(std::hypot(x[0] + 0.03, x[1]), 0.35);
                                })
            : read_nlf(source_path, grid.lo, grid.hi);
    if (!source.grid.same_layout(grid)) throw ValidationError("minimize: source grid mismatch");

    // W is only ever evaluated at grid nodes, so the stored source is
    // looked up by nearest node, which is exact.
    auto lookup = [&grid, &source](const double* x) {
        const int i = static_cast<int>(std::lround((x[0] - grid.lo) / grid.h()));
        const int j = grid.n == 2 ? static_cast<int>(std::lround((x[1] - grid.lo) / grid.h())) : 0;
        return source.values[grid.index(i, j)];
    };

    EnergySpec spec;
    if (energy == "quadratic") {
        spec.W = [lookup](const double* x, double y, const double* z) {
            return 0.5 * (z[0] * z[0] + z[1] * z[1]) - lookup(x) * y;
        };
        spec.DzW = [](const double*, double, const double* z, double* out) {
            out[0] = z[0];
            out[1] = z[1];
        };
        spec.coercivity_p = 2.0;
    } else if (energy == "plaplace") {
        spec.W = [lookup, p](const double* x, double y, const double* z) {
            return std::pow(std::hypot(z[0], z[1]), p) / p - lookup(x) * y;
        };
        spec.DzW = [p](const double*, double, const double* z, double* out) {
            const double m = std::hypot(z[0], z[1]);
            const double f = m == 0.0 ? 0.0 : std::pow(m, p - 2.0);
            out[0] = f * z[0];
            out[1] = f * z[1];
        };
        spec.coercivity_p = p;
    } else {
        throw CLI::ValidationError("minimize", "unknown energy '" + energy + "'");
    }
    spec.DyW = [lookup](const double* x, double, const double*) { return -lookup(x); };

    MinimizeConfig cfg;
    cfg.tolerance = tol;
    cfg.datum = datum_path.empty() ? GridField::zeros(grid, 1)
                                   : read_nlf(datum_path, grid.lo, grid.hi);
    if (!cfg.datum.grid.same_layout(grid)) throw ValidationError("minimize: datum grid mismatch");

    auto res = minimize(spec, cfg, masks, table);
    write_field(res.u, out, format, opts, "minimize");
    if (!trace.empty()) {
        CsvWriter csv(trace);
        for (auto& [k, v] : stamp("minimize", opts)) csv.comment(k, v);
        csv.comment("energy", energy);
        csv.comment("converged", res.converged ? "1" : "0");
        csv.comment("first_variation_norm", fmt(res.first_variation_norm));
        csv.comment("strong_residual",
                    fmt(el_strong_residual(spec, res.u, table, masks)));
        csv.header({"iteration", "energy"});
        for (std::size_t i = 0; i < res.energy_trace.size(); ++i)
            csv.row({static_cast<double>(i), res.energy_trace[i]});
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal-calculus workbench"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOpts opts;

    auto* kernel = app.add_subcommand("kernel", "tabulate the radial kernels");
    int kernel_samples = 256;
    std::string kernel_out = "kernel.csv";
    add_common(kernel, opts);
    kernel->add_option("--samples", kernel_samples, "table rows");
    kernel->add_option("--out", kernel_out, "output CSV");

    auto* grad = app.add_subcommand("grad", "nonlocal gradient of a stored field");
    std::string grad_in, grad_out = "g.nlf", grad_format = "nlf";
    double grad_lo = -1.0, grad_hi = 1.0;
    add_common(grad, opts, false);
    grad->add_option("--in", grad_in, "input NLF1 field")->required();
    grad->add_option("--out", grad_out, "output field");
    grad->add_option("--lo", grad_lo, "grid box lower corner");
    grad->add_option("--hi", grad_hi, "grid box upper corner");
    grad->add_option("--format", grad_format, "output format")->check(CLI::IsMember({"nlf", "csv"}));

    auto* ibp = app.add_subcommand("ibp-check", "integration-by-parts refinement study");
    std::vector<int> ibp_refine = {128, 256, 512};
    std::string ibp_out = "report.csv";
    add_common(ibp, opts);
    ibp->add_option("--refine", ibp_refine, "grid sizes")->delimiter(',');
    ibp->add_option("--out", ibp_out, "output CSV");

    auto* vk = app.add_subcommand("vkernel", "construct the inverse kernel V");
    int vk_cells = 4096, vk_pad = 4;
    std::string vk_out = "V.nlf", vk_report = "vreport.csv";
    bool vk_inject = false;
    add_common(vk, opts);
    vk->add_option("--N", vk_cells, "nodes per axis");
    vk->add_option("--pad", vk_pad, "box half-width in horizons");
    vk->add_option("--out", vk_out, "output NLF1 field");
    vk->add_option("--report", vk_report, "diagnostics CSV");
    vk->add_flag("--inject-negative-qhat", vk_inject)->group(""); // test hook

    auto* ftc = app.add_subcommand("ftc-check", "reconstruction round-trip report");
    int ftc_cells = 2048, ftc_pad = 4;
    std::string ftc_bump = "gauss", ftc_out = "report.csv";
    add_common(ftc, opts);
    ftc->add_option("--N", ftc_cells, "nodes per axis");
    ftc->add_option("--pad", ftc_pad, "padding factor");
    ftc->add_option("--bump", ftc_bump, "test bump: gauss|poly")
        ->check(CLI::IsMember({"gauss", "poly"}));
    ftc->add_option("--out", ftc_out, "output CSV");

    auto* ineq = app.add_subcommand("ineq", "functional inequality reports");
    std::string ineq_which;
    double ineq_p = 2.0, ineq_q = -1.0;
    int ineq_members = 50, ineq_cells = 256;
    std::string ineq_out = "report.csv";
    add_common(ineq, opts);
    ineq->add_option("which", ineq_which, "poincare|sobolev|morrey|trudinger|hardy|translation")
        ->required();
    ineq->add_option("--p", ineq_p, "integrability exponent");
    ineq->add_option("--q", ineq_q, "target exponent (sobolev)");
    ineq->add_option("--members", ineq_members, "ensemble size");
    ineq->add_option("--N", ineq_cells, "nodes per axis");
    ineq->add_option("--out", ineq_out, "output CSV");

    auto* mini = app.add_subcommand("minimize", "minimize a convex nonlocal energy");
    std::string mini_energy = "quadratic", mini_source, mini_datum;
    std::string mini_out = "u.nlf", mini_trace = "trace.csv";
    double mini_p = 2.0, mini_tol = 1e-8;
    int mini_cells = 64;
    add_common(mini, opts);
    mini->add_option("--energy", mini_energy, "quadratic|plaplace")
        ->check(CLI::IsMember({"quadratic", "plaplace"}));
    mini->add_option("--p", mini_p, "p-laplace exponent");
    mini->add_option("--N", mini_cells, "nodes per axis");
    mini->add_option("--source", mini_source, "NLF1 source field f");
    mini->add_option("--datum", mini_datum, "NLF1 boundary datum g");
    mini->add_option("--tol", mini_tol, "first-variation tolerance");
    mini->add_option("--out", mini_out, "output field");
    mini->add_option("--trace", mini_trace, "energy trace CSV");
    std::string mini_format = "nlf";
    mini->add_option("--format", mini_format, "output format")->check(CLI::IsMember({"nlf", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (kernel->parsed()) return run_kernel(opts, kernel_samples, kernel_out);
        if (grad->parsed()) return run_grad(opts, grad_in, grad_out, grad_lo, grad_hi, grad_format);
        if (ibp->parsed()) return run_ibp_check(opts, ibp_refine, ibp_out);
        if (vk->parsed()) return run_vkernel(opts, vk_cells, vk_pad, vk_out, vk_report, vk_inject);
        if (ftc->parsed()) return run_ftc_check(opts, ftc_cells, ftc_pad, ftc_bump, ftc_out);
        if (ineq->parsed())
            return run_ineq(opts, ineq_which, ineq_p, ineq_q, ineq_members, ineq_cells, ineq_out);
        if (mini->parsed())
            return run_minimize(opts, mini_energy, mini_p, mini_cells, mini_source, mini_datum,
                                mini_tol, mini_out, mini_trace, mini_format);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "nlcalc: %s\n", e.what());
        return 2;
    } catch (const InvariantError& e) {
        std::fprintf(stderr, "nlcalc: invariant violated: %s\n", e.what());
        return 1;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "nlcalc: invalid input: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "nlcalc: %s\n", e.what());
        return 3;
    }
    return 2;
}
