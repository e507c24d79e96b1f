#pragma once

// Independent reference solver: a trinomial Markov-chain approximation of the
// controlled (w, y) diffusion, written with none of the production solver's
// machinery. Per step and node it maximizes over (p, a) the expected
// continuation under the Kushner-Dupuis chain
//   w -> w + dw  with prob  (s^2/2 + dw * nu^+) dt / dw^2
//   w -> w - dw  with prob  (s^2/2 + dw * nu^-) dt / dw^2
//   w -> w       otherwise
// where nu = -(r^A(p) - h(a)) and s = theta(a) sigma (all probabilities
// non-negative under the CFL bounds), plus running reward (mu + r^P) dt;
// y moves deterministically by f dt with linear interpolation.
// At the w edges the missing neighbour is linearly extrapolated. This is the
// standard probabilistic construction whose limit is the same HJB, so the two
// solvers should agree to within discretization error.

#include <algorithm>
#include <cmath>
#include <vector>

#include "pacs/grid.hpp"
#include "pacs/model.hpp"

namespace testing {

inline double oracle_value_at_start(const pacs::ModelSpec& spec, const pacs::Grid& g) {
    const pacs::ThetaTable table = pacs::build_theta_table(spec);
    const int nw = g.n_w, ny = g.n_y;
    const double dw = g.dw(), dy = g.dy(), dt = g.dt();

    std::vector<double> next(static_cast<size_t>(nw) * ny), cur(next.size());
    for (int i = 0; i < nw; ++i)
        for (int j = 0; j < ny; ++j)
            next[static_cast<size_t>(i) * ny + j] =
                -spec.end_pay_inverse(g.w(i)) + spec.principal_terminal_reward(g.y(j));

    auto at = [&](const std::vector<double>& v, int i, double y) {
        // linear interpolation in y with clamped index, linear extrapolation
        // in w handled by the caller
        const double s = std::clamp((y - g.y_min) / dy, 0.0, static_cast<double>(ny - 1));
        const int j = std::min(static_cast<int>(s), ny - 2);
        const double f = s - j;
        return (1.0 - f) * v[static_cast<size_t>(i) * ny + j] +
               f * v[static_cast<size_t>(i) * ny + j + 1];
    };
    auto row = [&](const std::vector<double>& v, int i, double y) {
        if (i >= 0 && i < nw) return at(v, i, y);
        if (i < 0) return 2.0 * at(v, 0, y) - at(v, 1, y);
        return 2.0 * at(v, nw - 1, y) - at(v, nw - 2, y);
    };

    for (int n = g.n_t - 1; n >= 0; --n) {
        const double tm = g.t(n) + 0.5 * dt;
        for (int i = 0; i < nw; ++i) {
            for (int j = 0; j < ny; ++j) {
                double best = -1e300;
                for (int ia = 0; ia < table.size(); ++ia) {
                    if (!table.incentivizable(ia)) continue;
                    const double a = table.control(ia);
                    const double s2 = table.value(ia) * spec.revenue_vol;
                    const double var = s2 * s2;
                    const double ynew = g.y(j) + spec.system_rhs(tm, g.y(j), a) * dt;
                    for (double p : spec.payment_set) {
                        const double nu = -(spec.agent_pay_utility(p) - spec.effort_cost(a));
                        const double pu = (0.5 * var + dw * std::max(nu, 0.0)) * dt / (dw * dw);
                        const double pd = (0.5 * var + dw * std::max(-nu, 0.0)) * dt / (dw * dw);
                        const double pm = 1.0 - pu - pd;
                        const double cont = pu * row(next, i + 1, ynew) + pm * row(next, i, ynew) +
                                            pd * row(next, i - 1, ynew);
                        const double run =
                            (spec.revenue_drift(tm, a) +
                             spec.principal_running_reward(g.y(j), p)) *
                            dt;
                        best = std::max(best, cont + run);
                    }
                }
                cur[static_cast<size_t>(i) * ny + j] = best;
            }
        }
        std::swap(cur, next);
    }

    // value at (b, y0): bilinear in w too
    const double sw =
        std::clamp((spec.participation_payoff - g.w_min) / dw, 0.0, static_cast<double>(nw - 1));
    const int i = std::min(static_cast<int>(sw), nw - 2);
    const double fw = sw - i;
    return (1.0 - fw) * at(next, i, spec.y0) + fw * at(next, i + 1, spec.y0);
}

}  // namespace testing
