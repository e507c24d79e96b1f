#include "pacs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pacs/util.hpp"

namespace pacs {

bool Grid::same_shape(const Grid& other) const {
    return w_min == other.w_min && w_max == other.w_max && n_w == other.n_w && y_min == other.y_min &&
           y_max == other.y_max && n_y == other.n_y && n_t == other.n_t && t_max == other.t_max;
}

CoefficientBounds coefficient_bounds(const ModelSpec& spec, const Grid& grid) {
    CoefficientBounds b;
    for (int j = 0; j < grid.n_y; ++j) {
        const double y = grid.y(j);
        for (double a : spec.control_set)
            for (int nt = 0; nt <= 16; ++nt)
                b.max_abs_f = std::max(b.max_abs_f, std::abs(spec.system_rhs(nt * grid.t_max / 16.0, y, a)));
    }
    for (double p : spec.payment_set)
        for (double a : spec.control_set)
            b.max_abs_w_drift =
                std::max(b.max_abs_w_drift, std::abs(spec.agent_pay_utility(p) - spec.effort_cost(a)));
    return b;
}

Envelope y_envelope(const ModelSpec& spec) {
    const int steps = 4000;
    const double dt = spec.horizon / steps;
    double lo = spec.y0, hi = spec.y0;
    Envelope env{lo, hi};
    for (int k = 0; k < steps; ++k) {
        const double t = k * dt;
        double f_lo = std::numeric_limits<double>::infinity();
        double f_hi = -std::numeric_limits<double>::infinity();
        for (double a : spec.control_set) {
            f_lo = std::min(f_lo, spec.system_rhs(t, lo, a));
            f_hi = std::max(f_hi, spec.system_rhs(t, hi, a));
        }
        lo += dt * f_lo;
        hi += dt * f_hi;
        env.lo = std::min(env.lo, lo);
        env.hi = std::max(env.hi, hi);
    }
    return env;
}

void check_grid(const ModelSpec& spec, const ThetaTable& table, const Grid& grid) {
    if (grid.n_w < 3 || grid.n_y < 3) throw InvalidParams("grid needs n_w >= 3 and n_y >= 3");
    if (grid.n_t < 1) throw InvalidParams("grid needs n_t >= 1");
    if (!(grid.w_min < grid.w_max) || !(grid.y_min <= grid.y_max))
        throw InvalidParams("grid bounds are inverted");
    if (grid.t_max != spec.horizon) throw InvalidParams("grid t_max must equal the model horizon");
    const double b = spec.participation_payoff;
    if (!(grid.w_min < b && b < grid.w_max))
        throw InvalidParams("w bounds must contain the participation payoff strictly");
    if (!(grid.y_min <= spec.y0 && spec.y0 <= grid.y_max))
        throw InvalidParams("y bounds must contain y0");

    const Envelope env = y_envelope(spec);
    if (env.lo < grid.y_min - 1e-12 || env.hi > grid.y_max + 1e-12)
        throw InvalidParams("reachable y envelope [" + format_double(env.lo) + ", " +
                            format_double(env.hi) + "] escapes the y bounds");

    spec.estimate_lipschitz(grid.y_min, grid.y_max);  // finite-sample sanity

    const double dt = grid.dt();
    const double diff = spec.revenue_vol * table.max_theta();
    if (diff > 0.0) {
        const double cap = 0.5 * grid.dw() * grid.dw() / (diff * diff);
        if (dt > cap * (1.0 + 1e-12))
            throw CflViolation("dt=" + format_double(dt) + " exceeds diffusion bound " +
                               format_double(cap));
    }
    const CoefficientBounds cb = coefficient_bounds(spec, grid);
    if (cb.max_abs_f > 0.0 && dt * cb.max_abs_f > grid.dy() * (1.0 + 1e-12))
        throw CflViolation("dt * max|f| = " + format_double(dt * cb.max_abs_f) + " exceeds dy = " +
                           format_double(grid.dy()));
    if (cb.max_abs_w_drift > 0.0 && dt * cb.max_abs_w_drift > grid.dw() * (1.0 + 1e-12))
        throw CflViolation("dt * max|r^A - h| = " + format_double(dt * cb.max_abs_w_drift) +
                           " exceeds dw = " + format_double(grid.dw()));
}

Grid auto_grid(const ModelSpec& spec, const ThetaTable& table, int n_w, int n_y, int n_t,
               double cfl_fraction) {
    Grid g;
    g.n_w = n_w;
    g.n_y = n_y;
    g.t_max = spec.horizon;

    const double b = spec.participation_payoff;
    const double T = spec.horizon;
    double drift_bound = 0.0;
    for (double p : spec.payment_set)
        for (double a : spec.control_set)
            drift_bound = std::max(drift_bound, std::abs(spec.agent_pay_utility(p) - spec.effort_cost(a)));
    // 6 standard deviations of the innovation noise: large ensembles (1e4+
    // paths) routinely touch 4 sigma, and an escape aborts the whole run.
    const double radius = 6.0 * table.max_theta() * spec.revenue_vol * std::sqrt(T) + T * drift_bound;
    const double w_pad = radius > 0.0 ? radius : std::max(1.0, 0.1 * std::abs(b));
    g.w_min = b - w_pad;
    g.w_max = b + w_pad;

    const Envelope env = y_envelope(spec);
    const double y_pad = 0.05 * (env.hi - env.lo) + (env.hi > env.lo ? 0.05 : 1.0);
    g.y_min = env.lo - y_pad;
    g.y_max = env.hi + y_pad;

    if (n_t > 0) {
        g.n_t = n_t;
    } else {
        double cap = T;
        const double diff = spec.revenue_vol * table.max_theta();
        if (diff > 0.0) cap = std::min(cap, cfl_fraction * g.dw() * g.dw() / (diff * diff));
        const CoefficientBounds cb = coefficient_bounds(spec, g);
        if (cb.max_abs_f > 0.0) cap = std::min(cap, 0.9 * g.dy() / cb.max_abs_f);
        if (cb.max_abs_w_drift > 0.0) cap = std::min(cap, 0.9 * g.dw() / cb.max_abs_w_drift);
        g.n_t = std::max(1, static_cast<int>(std::ceil(T / cap)));
    }
    return g;
}

std::vector<Grid> dyadic_refinements(const ModelSpec& spec, const ThetaTable& table, const Grid& base,
                                     int levels) {
    std::vector<Grid> grids;
    grids.push_back(base);
    for (int k = 1; k <= levels; ++k) {
        Grid g = grids.back();
        g.n_w = 2 * (g.n_w - 1) + 1;
        g.n_y = 2 * (g.n_y - 1) + 1;
        // keep both the diffusion ratio dt/dw^2 and advection ratios stable
        double cap = g.t_max;
        const double diff = spec.revenue_vol * table.max_theta();
        if (diff > 0.0) cap = std::min(cap, 0.4 * g.dw() * g.dw() / (diff * diff));
        const CoefficientBounds cb = coefficient_bounds(spec, g);
        if (cb.max_abs_f > 0.0) cap = std::min(cap, 0.9 * g.dy() / cb.max_abs_f);
        if (cb.max_abs_w_drift > 0.0) cap = std::min(cap, 0.9 * g.dw() / cb.max_abs_w_drift);
        g.n_t = std::max(2 * grids.back().n_t, static_cast<int>(std::ceil(g.t_max / cap)));
        grids.push_back(g);
    }
    return grids;
}

}  // namespace pacs
