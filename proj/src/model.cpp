#include "pacs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pacs/util.hpp"

namespace pacs {
namespace {

void require(bool cond, const char* what) {
    if (!cond) throw InvalidParams(what);
}

bool sorted_strict(const std::vector<double>& v) {
    for (size_t k = 1; k < v.size(); ++k)
        if (!(v[k] > v[k - 1])) return false;
    return true;
}

/// Exact argmax membership of control `a` in max_{a'} {-h(a') + z a'};
/// ties count as membership.
bool in_argmax(const ModelSpec& spec, double a, double z) {
    double best = -std::numeric_limits<double>::infinity();
    for (double c : spec.control_set) best = std::max(best, -spec.effort_cost(c) + z * c);
    return -spec.effort_cost(a) + z * a >= best;
}

/// Largest control attaining the argmax; the argmax front is monotone
/// non-decreasing in z (increasing differences of -h(a) + z a).
double argmax_front(const ModelSpec& spec, double z) {
    double best = -std::numeric_limits<double>::infinity();
    double front = spec.control_set.front();
    for (double c : spec.control_set) {
        const double v = -spec.effort_cost(c) + z * c;
        if (v >= best) {
            best = v;
            front = c;
        }
    }
    return front;
}

}  // namespace

void ModelSpec::validate() const {
    require(static_cast<bool>(revenue_drift), "revenue_drift not set");
    require(static_cast<bool>(system_rhs), "system_rhs not set");
    require(static_cast<bool>(principal_running_reward), "principal_running_reward not set");
    require(static_cast<bool>(principal_terminal_reward), "principal_terminal_reward not set");
    require(static_cast<bool>(agent_pay_utility), "agent_pay_utility not set");
    require(static_cast<bool>(effort_cost), "effort_cost not set");
    require(static_cast<bool>(end_pay_utility), "end_pay_utility not set");
    require(static_cast<bool>(end_pay_inverse), "end_pay_inverse not set");
    require(revenue_vol >= 0.0, "sigma must be >= 0");
    require(horizon > 0.0, "horizon must be > 0");
    require(!control_set.empty(), "control_set is empty");
    require(!payment_set.empty(), "payment_set is empty");
    require(sorted_strict(control_set), "control_set must be sorted strictly ascending");
    require(sorted_strict(payment_set), "payment_set must be sorted strictly ascending");

    // g strictly increasing with a working inverse on a sampled range around
    // the participation payoff's pre-image.
    const double c0 = end_pay_inverse(participation_payoff);
    require(std::isfinite(c0), "g^{-1}(b) is not finite");
    const double span = 1.0 + std::abs(c0);
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 40; ++k) {
        const double c = c0 - span + 2.0 * span * k / 40.0;
        const double gc = end_pay_utility(c);
        require(std::isfinite(gc), "g returned a non-finite value");
        require(gc > prev, "g must be strictly increasing");
        prev = gc;
        const double back = end_pay_inverse(gc);
        require(std::abs(back - c) <= 1e-8 * (1.0 + std::abs(c)), "g^{-1}(g(c)) != c");
    }

    // h non-decreasing on the control set.
    for (size_t k = 1; k < control_set.size(); ++k)
        require(effort_cost(control_set[k]) >= effort_cost(control_set[k - 1]),
                "effort_cost must be non-decreasing on control_set");
}

double ModelSpec::estimate_lipschitz(double y_lo, double y_hi) const {
    if (!(y_hi > y_lo)) return 0.0;
    const double step = (y_hi - y_lo) / 64.0;
    double lip = 0.0;
    for (double a : control_set) {
        for (int k = 0; k < 64; ++k) {
            const double y1 = y_lo + k * step;
            const double y2 = y1 + step;
            for (double t : {0.0, 0.5 * horizon, horizon}) {
                const double f1 = system_rhs(t, y1, a);
                const double f2 = system_rhs(t, y2, a);
                if (!std::isfinite(f1) || !std::isfinite(f2))
                    throw InvalidParams("system_rhs returned a non-finite value on the grid range");
                lip = std::max(lip, std::abs(f2 - f1) / step);
            }
        }
    }
    return lip;
}

double default_z_max(const ModelSpec& spec) {
    double max_slope = 0.0;
    const auto& u = spec.control_set;
    for (size_t i = 0; i < u.size(); ++i)
        for (size_t j = i + 1; j < u.size(); ++j)
            max_slope = std::max(max_slope,
                                 (spec.effort_cost(u[j]) - spec.effort_cost(u[i])) / (u[j] - u[i]));
    return 2.0 * std::max(1.0, max_slope);
}

Sensitivity theta(double a, const ModelSpec& spec, double z_max, double z_tol) {
    if (!(z_tol > 0.0)) throw InvalidParams("theta: z_tol must be > 0");
    if (!std::binary_search(spec.control_set.begin(), spec.control_set.end(), a))
        throw InvalidParams("theta: control not in control_set");
    if (in_argmax(spec, a, 0.0)) return {0.0};

    // Bisect the monotone front predicate argmax_front(z) >= a, then confirm
    // membership just above the located boundary.
    if (argmax_front(spec, z_max) >= a) {
        double lo = 0.0, hi = z_max;
        while (hi - lo > z_tol) {
            const double mid = 0.5 * (lo + hi);
            (argmax_front(spec, mid) >= a ? hi : lo) = mid;
        }
        if (in_argmax(spec, a, hi)) return {hi};
    }

    // Knife-edge or non-interval membership on the finite set: the minimal
    // incentivizing z, when it exists, is one of the pairwise slope
    // boundaries of h. Scan them exactly in ascending order.
    std::vector<double> candidates;
    for (double c : spec.control_set) {
        if (c == a) continue;
        const double z = (spec.effort_cost(a) - spec.effort_cost(c)) / (a - c);
        if (z >= 0.0 && z <= z_max) candidates.push_back(z);
    }
    std::sort(candidates.begin(), candidates.end());
    for (double z : candidates)
        if (in_argmax(spec, a, z)) return {z};

    throw NoIncentivizingSensitivity("control " + format_double(a) +
                                     " is not in the argmax for any z in [0, " + format_double(z_max) +
                                     "]");
}

ThetaTable::ThetaTable(std::vector<double> controls, std::vector<double> thetas, std::vector<bool> ok)
    : controls_(std::move(controls)), theta_(std::move(thetas)), ok_(std::move(ok)) {}

double ThetaTable::value_of(double a) const {
    const auto it = std::lower_bound(controls_.begin(), controls_.end(), a);
    if (it == controls_.end() || *it != a) throw InvalidParams("theta lookup: control not in table");
    return theta_[static_cast<size_t>(it - controls_.begin())];
}

double ThetaTable::max_theta() const {
    double m = 0.0;
    for (size_t k = 0; k < theta_.size(); ++k)
        if (ok_[k]) m = std::max(m, theta_[k]);
    return m;
}

void ThetaTable::scale_nonminimal(double factor) {
    for (size_t k = 1; k < theta_.size(); ++k) theta_[k] *= factor;
}

ThetaTable build_theta_table(const ModelSpec& spec, double z_max, double z_tol) {
    if (z_max <= 0.0) z_max = default_z_max(spec);
    std::vector<double> thetas(spec.control_set.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> ok(spec.control_set.size(), false);
    bool any = false;
    for (size_t k = 0; k < spec.control_set.size(); ++k) {
        try {
            thetas[k] = theta(spec.control_set[k], spec, z_max, z_tol).value;
            ok[k] = true;
            any = true;
        } catch (const NoIncentivizingSensitivity&) {
            // control is rejected from the effective set
        }
    }
    if (!any) throw NoIncentivizingSensitivity("no control in the set is incentivizable");
    return ThetaTable(spec.control_set, std::move(thetas), std::move(ok));
}

PolicyChoice hamiltonian_upwind(const ModelSpec& spec, const ThetaTable& table, double t, double y,
                                const UpwindDerivs& d) {
    PolicyChoice best;
    best.value = -std::numeric_limits<double>::infinity();
    const double sig = spec.revenue_vol;
    for (int ia = 0; ia < table.size(); ++ia) {
        if (!table.incentivizable(ia)) continue;
        const double a = table.control(ia);
        const double fy = spec.system_rhs(t, y, a);
        const double th = table.value(ia);
        const double base = spec.revenue_drift(t, a) + fy * (fy >= 0.0 ? d.dy_plus : d.dy_minus) +
                            0.5 * th * th * sig * sig * d.dww;
        const double ha = spec.effort_cost(a);
        for (size_t ip = 0; ip < spec.payment_set.size(); ++ip) {
            const double p = spec.payment_set[ip];
            const double cw = -(spec.agent_pay_utility(p) - ha);
            const double v =
                base + cw * (cw >= 0.0 ? d.dw_plus : d.dw_minus) + spec.principal_running_reward(y, p);
            if (v > best.value) {
                best.value = v;
                best.u = a;
                best.pi = p;
                best.u_index = ia;
                best.pi_index = static_cast<int>(ip);
            }
        }
    }
    return best;
}

PolicyChoice hamiltonian(const ModelSpec& spec, const ThetaTable& table, double t, double y, double dw,
                         double dy, double dww) {
    UpwindDerivs d;
    d.dw_minus = d.dw_plus = dw;
    d.dy_minus = d.dy_plus = dy;
    d.dww = dww;
    return hamiltonian_upwind(spec, table, t, y, d);
}

}  // namespace pacs
