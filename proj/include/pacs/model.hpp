#pragma once

#include <functional>
#include <vector>

#include "pacs/errors.hpp"

namespace pacs {

/// Complete description of one principal-agent problem instance.
///
/// The revenue drift is mu(t, a) rather than the bare control so that
/// instances whose drift carries a price factor (e.g. (zeta - lambda_t)*N*a)
/// fit the same interface. The system right-hand side takes t as well, since
/// an outdoor-temperature profile enters it the same way the price enters mu.
/// Immutable after construction; all operations on it are pure.
struct ModelSpec {
    std::function<double(double t, double a)> revenue_drift;           // mu
    double revenue_vol = 0.0;                                          // sigma
    std::function<double(double t, double y, double a)> system_rhs;    // f
    std::function<double(double y, double p)> principal_running_reward;  // r^P
    std::function<double(double y)> principal_terminal_reward;           // q
    std::function<double(double p)> agent_pay_utility;                    // r^A
    std::function<double(double a)> effort_cost;                          // h
    std::function<double(double c)> end_pay_utility;                      // g
    std::function<double(double w)> end_pay_inverse;                      // g^{-1}
    std::vector<double> control_set;   // finite, sorted ascending
    std::vector<double> payment_set;   // finite, sorted ascending
    double horizon = 1.0;              // T
    double participation_payoff = 0.0;  // b
    double y0 = 0.0;

    /// Checks the structural invariants: sigma >= 0, T > 0, non-empty sorted
    /// sets, g strictly increasing with a working inverse on the sampled
    /// range, h non-decreasing on the control set. Throws InvalidParams.
    void validate() const;

    /// Empirical Lipschitz estimate of f in y over [y_lo, y_hi]; throws
    /// InvalidParams if f returns a non-finite value on the sample.
    double estimate_lipschitz(double y_lo, double y_hi) const;
};

struct Sensitivity {
    double value = 0.0;  // xi / theta(a); always >= 0
};

/// Smallest z in [0, z_max] such that `a` attains max_{a' in U} {-h(a') + z a'}
/// (ties count as membership, compared exactly). Bisection on the monotone
/// argmax-front predicate, with an exact scan over pairwise slope boundaries
/// as fallback when the finite-set predicate is not an interval around the
/// front. Throws NoIncentivizingSensitivity when no z works.
Sensitivity theta(double a, const ModelSpec& spec, double z_max, double z_tol);

/// theta for every control in spec.control_set. Controls that are never
/// incentive compatible are excluded (incentivizable(i) == false).
class ThetaTable {
public:
    ThetaTable() = default;
    ThetaTable(std::vector<double> controls, std::vector<double> thetas, std::vector<bool> ok);

    bool incentivizable(int i) const { return ok_[static_cast<size_t>(i)]; }
    double value(int i) const { return theta_[static_cast<size_t>(i)]; }
    /// Lookup by control value (exact match against the stored set).
    double value_of(double a) const;
    int size() const { return static_cast<int>(controls_.size()); }
    double control(int i) const { return controls_[static_cast<size_t>(i)]; }
    double max_theta() const;
    const std::vector<double>& thetas() const { return theta_; }

    /// Used by the negative-control path in verification: scales the stored
    /// sensitivity of every control except the smallest.
    void scale_nonminimal(double factor);

private:
    std::vector<double> controls_;
    std::vector<double> theta_;
    std::vector<bool> ok_;
};

/// Default z_max: comfortably above every pairwise slope of h on the set.
double default_z_max(const ModelSpec& spec);

ThetaTable build_theta_table(const ModelSpec& spec, double z_max = 0.0, double z_tol = 1e-9);

/// One-sided first differences plus central second difference at a point.
/// The solver picks the side per candidate control's drift sign; callers with
/// a single (central) derivative pass it on both sides.
struct UpwindDerivs {
    double dw_minus = 0.0;
    double dw_plus = 0.0;
    double dy_minus = 0.0;
    double dy_plus = 0.0;
    double dww = 0.0;
};

struct PolicyChoice {
    double value = 0.0;
    double u = 0.0;
    double pi = 0.0;
    int u_index = -1;
    int pi_index = -1;
};

/// Exhaustive max over P x U of
///   -(r^A(p) - h(a)) * D_w + f(t,y,a) * D_y + mu(t,a) + r^P(y,p)
///   + (theta(a) * sigma)^2 / 2 * D_ww,
/// with first derivatives taken upwind of each candidate's drift sign.
/// Controls without a sensitivity are skipped. Ties resolve to the smallest
/// control, then the smallest payment.
PolicyChoice hamiltonian_upwind(const ModelSpec& spec, const ThetaTable& table, double t, double y,
                                const UpwindDerivs& d);

/// Convenience overload with symmetric (e.g. central) first derivatives.
PolicyChoice hamiltonian(const ModelSpec& spec, const ThetaTable& table, double t, double y, double dw,
                         double dy, double dww);

}  // namespace pacs
