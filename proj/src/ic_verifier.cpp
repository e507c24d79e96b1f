#include "pacs/ic_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pacs/errors.hpp"
#include "pacs/util.hpp"

namespace pacs {
namespace {

UpwindDerivs value_derivs(const double* slice, int i, int j, const Grid& g) {
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

int control_index(const ModelSpec& spec, double a) {
    const auto it = std::lower_bound(spec.control_set.begin(), spec.control_set.end(), a);
    if (it == spec.control_set.end() || *it != a)
        throw InvalidParams("stored policy control not in control_set");
    return static_cast<int>(it - spec.control_set.begin());
}

double max_mu_spread(const ModelSpec& spec, const Grid& grid) {
    double spread = 0.0;
    for (int n = 0; n <= 32; ++n) {
        const double t = n * grid.t_max / 32.0;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double a : spec.control_set) {
            const double m = spec.revenue_drift(t, a);
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        spread = std::max(spread, hi - lo);
    }
    return spread;
}

}  // namespace

double agent_best_response(const ValueField& field, const ModelSpec& spec, const Grid& grid) {
    if (!grid.same_shape(field.grid))
        throw InvalidParams("agent_best_response: grid does not match the field's grid");
    const ThetaTable& table = field.theta;
    const int nw = grid.n_w, ny = grid.n_y, na = table.size();
    const std::size_t slice_sz = static_cast<std::size_t>(nw) * ny;
    const double sig = spec.revenue_vol;
    const double dt = grid.dt();

    // Explicit sub-stepping within each (frozen-policy) solver step, sized by
    // the combined monotonicity budget of the agent's scheme.
    const CoefficientBounds cb = coefficient_bounds(spec, grid);
    const double diff = sig * table.max_theta();
    const double drift_w_bound = cb.max_abs_w_drift + table.max_theta() * max_mu_spread(spec, grid);
    const double budget = diff * diff / (grid.dw() * grid.dw()) + drift_w_bound / grid.dw() +
                          cb.max_abs_f / grid.dy();
    const int m_sub = std::max(1, static_cast<int>(std::ceil(dt * budget)));
    const double dt_sub = dt / m_sub;

    std::vector<double> h(static_cast<size_t>(na)), half_diff2(static_cast<size_t>(na));
    for (int ia = 0; ia < na; ++ia) {
        h[static_cast<size_t>(ia)] = spec.effort_cost(table.control(ia));
        const double th = table.incentivizable(ia) ? table.value(ia) : 0.0;
        half_diff2[static_cast<size_t>(ia)] = 0.5 * th * th * sig * sig;
    }

    std::vector<double> cur(slice_sz), next(slice_sz);
    for (int i = 0; i < nw; ++i)
        for (int j = 0; j < ny; ++j) next[static_cast<size_t>(i) * ny + j] = grid.w(i);  // g(g^{-1}(w)) = w

    std::vector<double> mu(static_cast<size_t>(na));
    for (int n = grid.n_t - 1; n >= 0; --n) {
        const double tm = grid.t(n) + 0.5 * dt;
        for (int ia = 0; ia < na; ++ia)
            mu[static_cast<size_t>(ia)] = spec.revenue_drift(tm, table.control(ia));

        for (int sub = 0; sub < m_sub; ++sub) {
            const double* src = next.data();
            double* dst = cur.data();
            parallel_for(nw, [&](int i) {
                for (int j = 0; j < ny; ++j) {
                    const UpwindDerivs d = value_derivs(src, i, j, grid);
                    const double u = field.u_at(n, i, j);
                    const double pi = field.pi_at(n, i, j);
                    const int iu = control_index(spec, u);
                    const double th = table.value(iu);
                    const double ra = spec.agent_pay_utility(pi);
                    const double hu = h[static_cast<size_t>(iu)];
                    const double book_drift = -(ra - hu);
                    const double fy = spec.system_rhs(tm, grid.y(j), u);
                    const double fy_term = fy * (fy >= 0.0 ? d.dy_plus : d.dy_minus);
                    const double diff_term = 0.5 * th * th * sig * sig * d.dww;
                    double best = -std::numeric_limits<double>::infinity();
                    for (int ia = 0; ia < na; ++ia) {
                        const double cw =
                            book_drift + th * (mu[static_cast<size_t>(ia)] - mu[static_cast<size_t>(iu)]);
                        const double v = (ra - h[static_cast<size_t>(ia)]) +
                                         cw * (cw >= 0.0 ? d.dw_plus : d.dw_minus) + fy_term + diff_term;
                        best = std::max(best, v);
                    }
                    dst[static_cast<size_t>(i) * ny + j] =
                        src[static_cast<size_t>(i) * ny + j] + dt_sub * best;
                }
            });
            std::swap(cur, next);
        }
    }

    ValueField tmp;
    tmp.grid = grid;
    tmp.phi = std::move(next);
    return tmp.interp_phi(0, spec.participation_payoff, spec.y0);
}

std::vector<DeviationStrategy> default_strategies(const ModelSpec& spec, int n_switch_times) {
    std::vector<DeviationStrategy> out;
    out.push_back({"follow", ControlSchedule{}});
    for (double a : spec.control_set)
        out.push_back({"const u=" + format_double(a), [a](double, int) { return a; }});
    const double lo = spec.control_set.front();
    const double hi = spec.control_set.back();
    out.push_back({"lazy", [lo](double, int) { return lo; }});
    for (int s = 1; s <= n_switch_times; ++s) {
        const double ts = spec.horizon * s / (n_switch_times + 1);
        out.push_back({"hi_then_lo@" + format_double(ts),
                       [hi, lo, ts](double t, int) { return t < ts ? hi : lo; }});
        out.push_back({"lo_then_hi@" + format_double(ts),
                       [hi, lo, ts](double t, int) { return t < ts ? lo : hi; }});
    }
    return out;
}

std::vector<StrategyResult> deviation_mc(const ValueField& field, const ModelSpec& spec,
                                         const std::vector<DeviationStrategy>& strategies, int n_paths,
                                         std::uint64_t base_seed, int n_steps) {
    std::vector<StrategyResult> out;
    out.reserve(strategies.size());
    for (const auto& s : strategies) {
        const ControlSchedule* dev = s.schedule ? &s.schedule : nullptr;
        const EnsembleSummary e = ensemble(field, spec, n_paths, base_seed, n_steps, dev);
        out.push_back({s.name, e.agent_mean, e.agent_se});
    }
    return out;
}

double pointwise_ic_check(const ValueField& field, const ModelSpec& spec) {
    const Grid& g = field.grid;
    const int na = static_cast<int>(spec.control_set.size());
    std::vector<double> h(static_cast<size_t>(na));
    for (int ia = 0; ia < na; ++ia)
        h[static_cast<size_t>(ia)] = spec.effort_cost(spec.control_set[static_cast<size_t>(ia)]);

    double worst = 0.0;
    for (int n = 0; n < g.n_t; ++n) {
        for (int i = 0; i < g.n_w; ++i) {
            for (int j = 0; j < g.n_y; ++j) {
                const double u = field.u_at(n, i, j);
                const int iu = control_index(spec, u);
                const double th = field.theta.value(iu);
                double best = -std::numeric_limits<double>::infinity();
                for (int ia = 0; ia < na; ++ia)
                    best = std::max(best,
                                    -h[static_cast<size_t>(ia)] + th * spec.control_set[static_cast<size_t>(ia)]);
                const double at_u = -h[static_cast<size_t>(iu)] + th * u;
                worst = std::max(worst, best - at_u);
            }
        }
    }
    return worst;
}

DeviationReport run_verification(const ValueField& field, const ModelSpec& spec,
                                 const VerifyOptions& opts) {
    DeviationReport report;
    report.pointwise_violation = pointwise_ic_check(field, spec);
    report.best_response_value = agent_best_response(field, spec, field.grid);

    const EnsembleSummary rec = ensemble(field, spec, opts.n_paths, opts.base_seed);
    report.recommended_value = rec.agent_mean;

    double tol = opts.tolerance_floor;
    if (opts.estimate_discretization_gap) {
        Grid coarse = field.grid;
        coarse.n_w = std::max(3, (coarse.n_w + 1) / 2);
        coarse.n_y = std::max(3, (coarse.n_y + 1) / 2);
        coarse.n_t = std::max(1, (coarse.n_t + 1) / 2);
        const ValueField coarse_field = solve(spec, coarse);
        const double phi_fine = field.interp_phi(0, spec.participation_payoff, spec.y0);
        const double phi_coarse = coarse_field.interp_phi(0, spec.participation_payoff, spec.y0);
        const double br_coarse = agent_best_response(coarse_field, spec, coarse);
        tol += std::abs(phi_fine - phi_coarse) +
               std::abs(report.best_response_value - br_coarse);
    }
    report.tolerance = tol;

    report.strategy_table = deviation_mc(field, spec, default_strategies(spec, opts.n_switch_times),
                                         opts.n_paths, opts.base_seed);

    const double b = spec.participation_payoff;
    bool ok = report.pointwise_violation <= opts.tolerance_floor;
    ok = ok && std::abs(report.best_response_value - b) <= tol;
    ok = ok && report.best_response_value >= report.recommended_value - tol - 3.0 * rec.agent_se;
    for (const auto& s : report.strategy_table) ok = ok && s.mean <= b + 3.0 * s.se;
    report.passed = ok;
    return report;
}

}  // namespace pacs
