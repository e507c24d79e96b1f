#pragma once

#include <cmath>
#include <vector>

#include "pacs/grid.hpp"
#include "pacs/model.hpp"

namespace testing {

// No drift, no noise, no running rewards, q = 0, g = id: the value function
// is exactly phi(w, y, t) = -w and the contract is the constant w = b.
inline pacs::ModelSpec trivial_spec() {
    pacs::ModelSpec s;
    s.revenue_drift = [](double, double) { return 0.0; };
    s.revenue_vol = 0.0;
    s.system_rhs = [](double, double, double) { return 0.0; };
    s.principal_running_reward = [](double, double) { return 0.0; };
    s.principal_terminal_reward = [](double) { return 0.0; };
    s.agent_pay_utility = [](double p) { return p; };
    s.effort_cost = [](double) { return 0.0; };
    s.end_pay_utility = [](double c) { return c; };
    s.end_pay_inverse = [](double w) { return w; };
    s.control_set = {0.0};
    s.payment_set = {0.0};
    s.horizon = 1.0;
    s.participation_payoff = 0.25;
    s.y0 = 0.0;
    return s;
}

// trivial_spec with terminal reward q(y) = y and a deterministic y drift of
// +1, so phi(w, y, t) = -w + y + (T - t) exactly.
inline pacs::ModelSpec linear_q_spec() {
    pacs::ModelSpec s = trivial_spec();
    s.system_rhs = [](double, double, double) { return 1.0; };
    s.principal_terminal_reward = [](double y) { return y; };
    return s;
}

// Small two-control instance with genuine moral hazard, sized so a modest
// grid resolves it: h(a) = 0.3a on U = {0, 1} gives theta = {0, 0.3},
// sigma = 1. The terminal reward is shifted away from zero so relative
// comparisons are meaningful.
inline pacs::ModelSpec small_hazard_spec() {
    pacs::ModelSpec s;
    s.revenue_drift = [](double, double a) { return a; };
    s.revenue_vol = 1.0;
    s.system_rhs = [](double, double, double a) { return 0.5 * a - 0.25; };
    s.principal_running_reward = [](double y, double p) { return -0.5 * (y - 1.0) * (y - 1.0) - p; };
    s.principal_terminal_reward = [](double y) { return 0.5 * y + 1.0; };
    s.agent_pay_utility = [](double p) { return p; };
    s.effort_cost = [](double a) { return 0.3 * a; };
    s.end_pay_utility = [](double c) { return c; };
    s.end_pay_inverse = [](double w) { return w; };
    s.control_set = {0.0, 1.0};
    s.payment_set = {0.0, 0.5};
    s.horizon = 1.0;
    s.participation_payoff = 0.0;
    s.y0 = 0.0;
    return s;
}

inline pacs::Grid small_hazard_grid(int n_w = 21, int n_y = 21, int n_t = 50) {
    pacs::Grid g;
    g.w_min = -1.4;
    g.w_max = 1.4;
    g.n_w = n_w;
    g.y_min = -0.6;
    g.y_max = 0.6;
    g.n_y = n_y;
    g.n_t = n_t;
    g.t_max = 1.0;
    return g;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace testing
