#include "pacs/hjb_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "pacs/errors.hpp"
#include "pacs/util.hpp"

namespace pacs {
namespace {

/// Nodal stencil with the boundary convention: one-sided first derivatives
/// (repeated on both sides) and zero curvature at the edge rows.
UpwindDerivs node_derivs(const double* slice, int i, int j, const Grid& g) {
    UpwindDerivs d;
    const int ny = g.n_y;
    const double dw = g.dw(), dy = g.dy();
    const double c = slice[i * ny + j];
    if (i == 0) {
        d.dw_minus = d.dw_plus = (slice[(i + 1) * ny + j] - c) / dw;
        d.dww = 0.0;
    } else if (i == g.n_w - 1) {
        d.dw_minus = d.dw_plus = (c - slice[(i - 1) * ny + j]) / dw;
        d.dww = 0.0;
    } else {
        const double lo = slice[(i - 1) * ny + j], hi = slice[(i + 1) * ny + j];
        d.dw_minus = (c - lo) / dw;
        d.dw_plus = (hi - c) / dw;
        d.dww = (hi - 2.0 * c + lo) / (dw * dw);
    }
    if (j == 0) {
        d.dy_minus = d.dy_plus = (slice[i * ny + j + 1] - c) / dy;
    } else if (j == g.n_y - 1) {
        d.dy_minus = d.dy_plus = (c - slice[i * ny + j - 1]) / dy;
    } else {
        d.dy_minus = (c - slice[i * ny + j - 1]) / dy;
        d.dy_plus = (slice[i * ny + j + 1] - c) / dy;
    }
    return d;
}

/// Per-step coefficient tables, sampled once at the step midpoint so the
/// inner node loop is pure arithmetic. Laid out to mirror hamiltonian_upwind
/// exactly (same evaluation order, same tie-breaking).
struct StepTables {
    std::vector<double> mu;          // [ia]
    std::vector<double> f;           // [j * na + ia]
    std::vector<double> half_diff2;  // [ia] = 0.5 theta^2 sigma^2 (partial product)
    std::vector<double> h;           // [ia]
    std::vector<double> cw;          // [ip * na + ia] = -(r^A(p) - h(a))
    std::vector<double> rp;          // [j * np + ip]
    std::vector<char> ok;            // [ia]
};

StepTables make_static_tables(const ModelSpec& spec, const ThetaTable& table, const Grid& grid) {
    StepTables t;
    const int na = table.size();
    const int np = static_cast<int>(spec.payment_set.size());
    t.half_diff2.resize(na);
    t.h.resize(na);
    t.ok.resize(na);
    const double sig = spec.revenue_vol;
    for (int ia = 0; ia < na; ++ia) {
        t.ok[ia] = table.incentivizable(ia) ? 1 : 0;
        t.h[ia] = spec.effort_cost(table.control(ia));
        const double th = table.value(ia);
        t.half_diff2[ia] = t.ok[ia] ? 0.5 * th * th * sig * sig : 0.0;
    }
    t.cw.resize(static_cast<size_t>(np) * na);
    for (int ip = 0; ip < np; ++ip) {
        const double ra = spec.agent_pay_utility(spec.payment_set[ip]);
        for (int ia = 0; ia < na; ++ia) t.cw[static_cast<size_t>(ip) * na + ia] = -(ra - t.h[ia]);
    }
    t.rp.resize(static_cast<size_t>(grid.n_y) * np);
    for (int j = 0; j < grid.n_y; ++j)
        for (int ip = 0; ip < np; ++ip)
            t.rp[static_cast<size_t>(j) * np + ip] =
                spec.principal_running_reward(grid.y(j), spec.payment_set[ip]);
    return t;
}

void fill_time_tables(const ModelSpec& spec, const ThetaTable& table, const Grid& grid, double tm,
                      StepTables& t) {
    const int na = table.size();
    t.mu.assign(static_cast<size_t>(na), 0.0);
    t.f.assign(static_cast<size_t>(grid.n_y) * na, 0.0);
    for (int ia = 0; ia < na; ++ia) {
        if (!t.ok[ia]) continue;
        t.mu[ia] = spec.revenue_drift(tm, table.control(ia));
        for (int j = 0; j < grid.n_y; ++j)
            t.f[static_cast<size_t>(j) * na + ia] = spec.system_rhs(tm, grid.y(j), table.control(ia));
    }
}

/// Tabulated twin of hamiltonian_upwind; identical loop order and arithmetic.
PolicyChoice node_max(const StepTables& t, const ThetaTable& table, const std::vector<double>& pays,
                      int j, const UpwindDerivs& d) {
    PolicyChoice best;
    best.value = -std::numeric_limits<double>::infinity();
    const int na = table.size();
    const int np = static_cast<int>(pays.size());
    for (int ia = 0; ia < na; ++ia) {
        if (!t.ok[ia]) continue;
        const double fy = t.f[static_cast<size_t>(j) * na + ia];
        const double base =
            t.mu[ia] + fy * (fy >= 0.0 ? d.dy_plus : d.dy_minus) + t.half_diff2[ia] * d.dww;
        for (int ip = 0; ip < np; ++ip) {
            const double cw = t.cw[static_cast<size_t>(ip) * na + ia];
            const double v = base + cw * (cw >= 0.0 ? d.dw_plus : d.dw_minus) +
                             t.rp[static_cast<size_t>(j) * np + ip];
            if (v > best.value) {
                best.value = v;
                best.u = table.control(ia);
                best.pi = pays[static_cast<size_t>(ip)];
                best.u_index = ia;
                best.pi_index = ip;
            }
        }
    }
    return best;
}

struct SweepSink {
    // null members = light mode
    std::vector<double>* phi = nullptr;
    std::vector<double>* policy_u = nullptr;
    std::vector<double>* policy_pi = nullptr;
};

/// Backward sweep shared by solve() and solve_value_at_start().
double sweep(const ModelSpec& spec, const ThetaTable& table, const Grid& grid, const SweepSink& sink) {
    spec.validate();
    check_grid(spec, table, grid);

    const int nw = grid.n_w, ny = grid.n_y;
    const std::size_t slice_sz = static_cast<std::size_t>(nw) * ny;
    std::vector<double> cur(slice_sz), next(slice_sz);

    for (int i = 0; i < nw; ++i)
        for (int j = 0; j < ny; ++j)
            next[static_cast<size_t>(i) * ny + j] =
                -spec.end_pay_inverse(grid.w(i)) + spec.principal_terminal_reward(grid.y(j));
    if (sink.phi)
        std::copy(next.begin(), next.end(), sink.phi->begin() + static_cast<std::size_t>(grid.n_t) * slice_sz);

    StepTables tables = make_static_tables(spec, table, grid);
    const double dt = grid.dt();

    for (int n = grid.n_t - 1; n >= 0; --n) {
        const double tm = grid.t(n) + 0.5 * dt;
        fill_time_tables(spec, table, grid, tm, tables);
        const double* src = next.data();
        double* dst = cur.data();
        std::atomic<bool> finite{true};
        parallel_for(nw, [&](int i) {
            for (int j = 0; j < ny; ++j) {
                const UpwindDerivs d = node_derivs(src, i, j, grid);
                const PolicyChoice pc = node_max(tables, table, spec.payment_set, j, d);
                const double v = src[static_cast<size_t>(i) * ny + j] + dt * pc.value;
                if (!std::isfinite(v)) finite.store(false, std::memory_order_relaxed);
                dst[static_cast<size_t>(i) * ny + j] = v;
                if (sink.policy_u) {
                    const std::size_t k = static_cast<std::size_t>(n) * slice_sz +
                                          static_cast<std::size_t>(i) * ny + j;
                    (*sink.policy_u)[k] = pc.u;
                    (*sink.policy_pi)[k] = pc.pi;
                }
            }
        });
        if (!finite)
            throw NonFiniteValue("value diverged while stepping to time index " + std::to_string(n));
        if (sink.phi)
            std::copy(cur.begin(), cur.end(), sink.phi->begin() + static_cast<std::size_t>(n) * slice_sz);
        std::swap(cur, next);
    }

    // `next` now holds the t=0 slice; interpolate at (b, y0).
    ValueField tmp;
    tmp.grid = grid;
    tmp.phi = std::move(next);
    const double v0 = tmp.interp_phi(0, spec.participation_payoff, spec.y0);
    next = std::move(tmp.phi);
    return v0;
}

}  // namespace

double ValueField::interp_phi(int n, double w, double y) const {
    const double dw = grid.dw(), dy = grid.dy();
    int i = static_cast<int>(std::floor((w - grid.w_min) / dw));
    int j = static_cast<int>(std::floor((y - grid.y_min) / dy));
    i = std::clamp(i, 0, grid.n_w - 2);
    j = std::clamp(j, 0, grid.n_y - 2);
    const double fw = std::clamp((w - grid.w(i)) / dw, 0.0, 1.0);
    const double fy = std::clamp((y - grid.y(j)) / dy, 0.0, 1.0);
    const double v00 = phi_at(n, i, j), v01 = phi_at(n, i, j + 1);
    const double v10 = phi_at(n, i + 1, j), v11 = phi_at(n, i + 1, j + 1);
    return (1.0 - fw) * ((1.0 - fy) * v00 + fy * v01) + fw * ((1.0 - fy) * v10 + fy * v11);
}

ValueField solve(const ModelSpec& spec, const Grid& grid) {
    ValueField field;
    field.grid = grid;
    field.theta = build_theta_table(spec);
    const std::size_t slice_sz = static_cast<std::size_t>(grid.n_w) * grid.n_y;
    field.phi.assign((static_cast<std::size_t>(grid.n_t) + 1) * slice_sz, 0.0);
    field.policy_u.assign(static_cast<std::size_t>(grid.n_t) * slice_sz, 0.0);
    field.policy_pi.assign(static_cast<std::size_t>(grid.n_t) * slice_sz, 0.0);
    SweepSink sink{&field.phi, &field.policy_u, &field.policy_pi};
    sweep(spec, field.theta, grid, sink);
    return field;
}

double solve_value_at_start(const ModelSpec& spec, const Grid& grid) {
    const ThetaTable table = build_theta_table(spec);
    return sweep(spec, table, grid, SweepSink{});
}

std::pair<double, double> policy_at(const ValueField& field, const ModelSpec& spec, double w, double y,
                                    double t) {
    const Grid& g = field.grid;
    const double eps_w = 1e-9 * (1.0 + std::abs(g.w_max - g.w_min));
    const double eps_y = 1e-9 * (1.0 + std::abs(g.y_max - g.y_min));
    if (w < g.w_min - eps_w || w > g.w_max + eps_w)
        throw OutOfBounds("policy_at: w=" + format_double(w) + " outside [" + format_double(g.w_min) +
                          ", " + format_double(g.w_max) + "]");
    if (y < g.y_min - eps_y || y > g.y_max + eps_y)
        throw OutOfBounds("policy_at: y=" + format_double(y) + " outside [" + format_double(g.y_min) +
                          ", " + format_double(g.y_max) + "]");
    if (t < -1e-12 || t > g.t_max * (1.0 + 1e-12)) throw OutOfBounds("policy_at: t outside [0, T]");

    const int n = std::min(static_cast<int>(std::floor(t / g.dt())), g.n_t - 1);
    const double* slice = field.phi.data() + field.idx(n + 1, 0, 0);

    int i = static_cast<int>(std::floor((w - g.w_min) / g.dw()));
    int j = static_cast<int>(std::floor((y - g.y_min) / g.dy()));
    i = std::clamp(i, 0, g.n_w - 2);
    j = std::clamp(j, 0, g.n_y - 2);
    const double fw = std::clamp((w - g.w(i)) / g.dw(), 0.0, 1.0);
    const double fy = std::clamp((y - g.y(j)) / g.dy(), 0.0, 1.0);

    // Bilinear blend of the four corner stencils; at a node the weights
    // degenerate and this is exactly the solver's stencil.
    const UpwindDerivs d00 = node_derivs(slice, i, j, g);
    const UpwindDerivs d01 = node_derivs(slice, i, j + 1, g);
    const UpwindDerivs d10 = node_derivs(slice, i + 1, j, g);
    const UpwindDerivs d11 = node_derivs(slice, i + 1, j + 1, g);
    auto blend = [&](double a00, double a01, double a10, double a11) {
        return (1.0 - fw) * ((1.0 - fy) * a00 + fy * a01) + fw * ((1.0 - fy) * a10 + fy * a11);
    };
    UpwindDerivs d;
    d.dw_minus = blend(d00.dw_minus, d01.dw_minus, d10.dw_minus, d11.dw_minus);
    d.dw_plus = blend(d00.dw_plus, d01.dw_plus, d10.dw_plus, d11.dw_plus);
    d.dy_minus = blend(d00.dy_minus, d01.dy_minus, d10.dy_minus, d11.dy_minus);
    d.dy_plus = blend(d00.dy_plus, d01.dy_plus, d10.dy_plus, d11.dy_plus);
    d.dww = blend(d00.dww, d01.dww, d10.dww, d11.dww);

    const double tm = g.t(n) + 0.5 * g.dt();
    const PolicyChoice pc = hamiltonian_upwind(spec, field.theta, tm, y, d);
    return {pc.u, pc.pi};
}

ConvergenceReport convergence_report(const ModelSpec& spec, const std::vector<Grid>& grids) {
    ConvergenceReport report;
    for (const Grid& g : grids) {
        ConvergenceReport::Row row;
        row.grid = g;
        row.value = solve_value_at_start(spec, g);
        report.rows.push_back(row);
    }
    for (size_t k = 1; k < report.rows.size(); ++k)
        report.gaps.push_back(std::abs(report.rows[k].value - report.rows[k - 1].value));
    for (size_t k = 1; k < report.gaps.size(); ++k)
        if (report.gaps[k] > report.gaps[k - 1]) report.gaps_decreasing = false;
    return report;
}

}  // namespace pacs
