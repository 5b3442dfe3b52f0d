#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/params.hpp"
#include "nlc/util.hpp"

namespace nlc {

// Uniform tensor grid on the cube [lo, hi)^n with N nodes per axis at
// x_i = lo + i h, h = (hi - lo)/N. The box is treated as periodic by the
// spectral machinery, so the node at hi is not duplicated. N is kept a
// power of two.
struct GridSpec {
    int n = 1;
    double lo = -1.0;
    double hi = 1.0;
    int cells = 256;

    void validate() const {
        if (n != 1 && n != 2) throw ValidationError("GridSpec: n must be 1 or 2");
        if (!(hi > lo)) throw ValidationError("GridSpec: empty box");
        if (cells < 4 || (cells & (cells - 1)) != 0)
            throw ValidationError("GridSpec: cells per axis must be a power of two >= 4");
    }

    double h() const { return (hi - lo) / cells; }
    double length() const { return hi - lo; }

    std::size_t node_count() const {
        std::size_t c = 1;
        for (int a = 0; a < n; ++a) c *= static_cast<std::size_t>(cells);
        return c;
    }

    double cell_volume() const { return std::pow(h(), n); }

    double coord(int i) const { return lo + i * h(); }

    std::size_t index(int i, int j = 0) const {
        return n == 1 ? static_cast<std::size_t>(i)
                      : static_cast<std::size_t>(i) * cells + static_cast<std::size_t>(j);
    }

    std::array<int, 2> unindex(std::size_t lin) const {
        if (n == 1) return {static_cast<int>(lin), 0};
        return {static_cast<int>(lin / cells), static_cast<int>(lin % cells)};
    }

    std::array<double, 2> point(std::size_t lin) const {
        auto ij = unindex(lin);
        return {coord(ij[0]), n == 2 ? coord(ij[1]) : 0.0};
    }

    bool same_layout(const GridSpec& o) const {
        return n == o.n && lo == o.lo && hi == o.hi && cells == o.cells;
    }
};

// Scalar or vector samples on a grid; component planes are stored
// contiguously (values[c * node_count + lin]).
struct GridField {
    GridSpec grid;
    int components = 1;
    std::vector<double> values;

    static GridField zeros(const GridSpec& grid, int components = 1) {
        grid.validate();
        GridField f;
        f.grid = grid;
        f.components = components;
        f.values.assign(grid.node_count() * components, 0.0);
        return f;
    }

    static GridField sample(const GridSpec& grid, const std::function<double(const double*)>& fn) {
        GridField f = zeros(grid, 1);
        const std::size_t count = grid.node_count();
        for (std::size_t lin = 0; lin < count; ++lin) {
            auto x = grid.point(lin);
            f.values[lin] = fn(x.data());
        }
        return f;
    }

    double& at(std::size_t lin, int c = 0) { return values[static_cast<std::size_t>(c) * grid.node_count() + lin]; }
    double at(std::size_t lin, int c = 0) const { return values[static_cast<std::size_t>(c) * grid.node_count() + lin]; }

    // Euclidean magnitude of the node value across components.
    double magnitude(std::size_t lin) const {
        if (components == 1) return std::abs(values[lin]);
        double m = 0.0;
        const std::size_t count = grid.node_count();
        for (int c = 0; c < components; ++c) {
            double v = values[static_cast<std::size_t>(c) * count + lin];
            m += v * v;
        }
        return std::sqrt(m);
    }
};

using Mask = std::vector<std::uint8_t>;

// Axis-aligned box or ball domain described analytically.
struct OmegaShape {
    enum class Kind { box, ball };
    Kind kind = Kind::box;
    std::array<double, 2> center = {0.0, 0.0};
    std::array<double, 2> half = {0.5, 0.5}; // box half-widths
    double radius = 0.5;                     // ball radius

    static OmegaShape make_box(std::array<double, 2> center, std::array<double, 2> half) {
        OmegaShape s;
        s.kind = Kind::box;
        s.center = center;
        s.half = half;
        return s;
    }

    static OmegaShape make_ball(std::array<double, 2> center, double radius) {
        OmegaShape s;
        s.kind = Kind::ball;
        s.center = center;
        s.radius = radius;
        return s;
    }

    // Signed distance to the boundary: positive inside, negative outside.
    double signed_distance(const double* x, int n) const {
        if (kind == Kind::ball) {
            double r2 = 0.0;
            for (int a = 0; a < n; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
            return radius - std::sqrt(r2);
        }
        double inside = std::numeric_limits<double>::infinity();
        double out2 = 0.0;
        bool outside = false;
        for (int a = 0; a < n; ++a) {
            double d = half[a] - std::abs(x[a] - center[a]);
            inside = std::min(inside, d);
            if (d < 0.0) {
                outside = true;
                out2 += d * d;
            }
        }
        return outside ? -std::sqrt(out2) : inside;
    }

    // extent of the shape along one axis
    double axis_reach(int a) const { return kind == Kind::ball ? radius : half[a]; }
};

// Node masks for the collar geometry: omega, omega_delta = omega + B(0,delta),
// collar = omega_delta \ omega, inner = { x : dist(x, boundary) > delta }.
struct DomainMasks {
    Mask omega, omega_delta, collar, inner;
    std::size_t omega_count = 0, omega_delta_count = 0, collar_count = 0, inner_count = 0;
};

inline DomainMasks make_masks(const GridSpec& grid, const OmegaShape& shape, double delta) {
    grid.validate();
    if (!(delta > 0.0)) throw ValidationError("make_masks: delta must be positive");

    // The grid box must strictly contain omega_delta.
    for (int a = 0; a < grid.n; ++a) {
        double reach = shape.axis_reach(a) + delta;
        if (shape.center[a] - reach <= grid.lo || shape.center[a] + reach >= grid.hi)
            throw ValidationError("make_masks: grid box does not contain omega_delta");
    }

    const std::size_t count = grid.node_count();
    DomainMasks m;
    m.omega.assign(count, 0);
    m.omega_delta.assign(count, 0);
    m.collar.assign(count, 0);
    m.inner.assign(count, 0);
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto x = grid.point(lin);
        const double d = shape.signed_distance(x.data(), grid.n);
        if (d > 0.0) {
            m.omega[lin] = 1;
            ++m.omega_count;
        }
        if (d > -delta) {
            m.omega_delta[lin] = 1;
            ++m.omega_delta_count;
        }
        if (d > delta) {
            m.inner[lin] = 1;
            ++m.inner_count;
        }
        if (m.omega_delta[lin] && !m.omega[lin]) {
            m.collar[lin] = 1;
            ++m.collar_count;
        }
    }
    if (m.inner_count == 0)
        throw EmptyInteriorError("make_masks: inner domain omega_{-delta} has no grid node");
    return m;
}

// Masked L^p norm, (h^n sum_{mask} |v|^p)^{1/p}; max over the mask for
// p = infinity. Vector fields contribute their Euclidean node magnitude.
inline double lp_norm(const GridField& field, const Mask& mask, double p) {
    const std::size_t count = field.grid.node_count();
    if (mask.size() != count) throw GridMismatchError("lp_norm: mask size mismatch");
    if (!(p >= 1.0) && !std::isinf(p)) throw ValidationError("lp_norm: p must be >= 1 or infinity");
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t lin = 0; lin < count; ++lin)
            if (mask[lin]) m = std::max(m, field.magnitude(lin));
        return m;
    }
    std::vector<double> terms;
    terms.reserve(count);
    for (std::size_t lin = 0; lin < count; ++lin)
        if (mask[lin]) terms.push_back(std::pow(field.magnitude(lin), p));
    return std::pow(field.grid.cell_volume() * block_sum(terms), 1.0 / p);
}

inline Mask full_mask(const GridSpec& grid) { return Mask(grid.node_count(), 1); }

// Combined space norm (|u|^p over omega_delta + |Du|^p over omega)^{1/p}.
inline double hspd_norm(const GridField& u, const GridField& gradient, const DomainMasks& masks,
                        double p) {
    if (std::isinf(p))
        return std::max(lp_norm(u, masks.omega_delta, p), lp_norm(gradient, masks.omega, p));
    const double a = lp_norm(u, masks.omega_delta, p);
    const double b = lp_norm(gradient, masks.omega, p);
    return std::pow(std::pow(a, p) + std::pow(b, p), 1.0 / p);
}

// Nodes whose delta-ball stencil stays inside the (non-periodic) grid box.
inline Mask interior_mask(const GridSpec& grid, double delta) {
    const int r = static_cast<int>(std::ceil(delta / grid.h()));
    Mask m(grid.node_count(), 0);
    const std::size_t count = grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) {
        auto ij = grid.unindex(lin);
        bool ok = true;
        for (int a = 0; a < grid.n; ++a)
            if (ij[a] - r < 0 || ij[a] + r >= grid.cells) ok = false;
        if (ok) m[lin] = 1;
    }
    return m;
}

// Support mask with a relative threshold, plus its bounding ball radius
// about the box center.
inline double support_radius(const GridField& field, double rel_threshold = 1e-12) {
    double peak = 0.0;
    const std::size_t count = field.grid.node_count();
    for (std::size_t lin = 0; lin < count; ++lin) peak = std::max(peak, field.magnitude(lin));
    if (peak == 0.0) return 0.0;
    const double thr = rel_threshold * peak;
    const double mid = 0.5 * (field.grid.lo + field.grid.hi);
    double radius = 0.0;
    for (std::size_t lin = 0; lin < count; ++lin) {
        if (field.magnitude(lin) <= thr) continue;
        auto x = field.grid.point(lin);
        for (int a = 0; a < field.grid.n; ++a)
            radius = std::max(radius, std::abs(x[a] - mid));
    }
    return radius;
}

} // namespace nlc
