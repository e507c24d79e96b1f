#include "pacs/loadcontrol.hpp"

#include <cmath>

#include "pacs/errors.hpp"
#include "pacs/util.hpp"

namespace pacs::loadcontrol {
namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw InvalidParams("load control: " + what);
}

}  // namespace

TimeSeries default_price_series(double horizon) {
    require(horizon > 0.0, "horizon must be > 0");
    const double base = 0.05, amp = 0.14, width = 1.2, peak = 0.75 * horizon;
    const int n = static_cast<int>(std::round(horizon / 0.25)) + 1;
    return TimeSeries::sample(
        [=](double t) {
            const double z = (t - peak) / width;
            return base + amp * std::exp(-z * z);
        },
        0.0, horizon, std::max(2, n));
}

TimeSeries default_outdoor_series(double horizon) {
    require(horizon > 0.0, "horizon must be > 0");
    const int n = static_cast<int>(std::round(horizon / 0.25)) + 1;
    return TimeSeries::sample(
        // Base/amplitude keep the full-power cooling equilibrium
        // Theta - kappa*u_max/alpha about two degrees below the band top, so
        // pre-cooling has headroom and an OFF block can ride through the
        // price peak without leaving the comfort band.
        [=](double t) { return 23.5 + 1.0 * std::sin(3.14159265358979323846 * t / horizon); }, 0.0,
        horizon, std::max(2, n));
}

LoadControlParams default_instance() {
    LoadControlParams p;
    p.price_series = default_price_series(p.horizon);
    p.outdoor_series = default_outdoor_series(p.horizon);
    p.payment_levels.clear();
    for (int k = 0; k <= 10; ++k) p.payment_levels.push_back(0.02 * k);
    return p;
}

ModelSpec build_model(const LoadControlParams& params) {
    LoadControlParams p = params;
    if (p.price_series.empty()) p.price_series = default_price_series(p.horizon);
    if (p.outdoor_series.empty()) p.outdoor_series = default_outdoor_series(p.horizon);
    if (p.payment_levels.empty())
        for (int k = 0; k <= 10; ++k) p.payment_levels.push_back(0.02 * k);

    require(p.n_customers >= 1, "n_customers must be >= 1");
    require(p.tariff > 0.0, "tariff must be > 0");
    require(p.vol > 0.0, "vol must be > 0");
    require(p.penalty_scale > 0.0, "penalty_scale must be > 0");
    require(p.penalty_sharpness > 0.0, "penalty_sharpness must be > 0");
    require(p.cooling_rate > 0.0, "cooling_rate must be > 0");
    require(p.thermal_coupling > 0.0, "thermal_coupling must be > 0");
    require(p.horizon > 0.0, "horizon must be > 0");
    require(p.band_low < p.y_init && p.y_init <= p.band_high,
            "band_low < y_init <= band_high must hold");
    require(p.price_series.covers(0.0, p.horizon), "price_series must cover [0, horizon]");
    require(p.outdoor_series.covers(0.0, p.horizon), "outdoor_series must cover [0, horizon]");
    require(!p.control_levels.empty(), "control_levels must be non-empty");

    const double N = static_cast<double>(p.n_customers);
    const double zeta = p.tariff;
    const TimeSeries price = p.price_series;
    const TimeSeries outdoor = p.outdoor_series;
    const double alpha = p.thermal_coupling;
    const double kappa = p.cooling_rate;
    const double eta1 = p.penalty_scale;
    const double eta2 = p.penalty_sharpness;
    const double y_lo = p.band_low;
    const double y_hi = p.band_high;

    ModelSpec spec;
    spec.revenue_drift = [zeta, N, price](double t, double a) { return (zeta - price(t)) * N * a; };
    spec.revenue_vol = p.vol;
    spec.system_rhs = [alpha, kappa, outdoor](double t, double y, double a) {
        return alpha * (outdoor(t) - y) - kappa * a;
    };
    spec.principal_running_reward = [eta1, eta2, y_lo, y_hi](double y, double pay) {
        return -eta1 * (std::exp(eta2 * (y - y_hi)) + std::exp(eta2 * (y_lo - y))) - pay;
    };
    spec.principal_terminal_reward = [](double) { return 0.0; };
    spec.agent_pay_utility = [](double pay) { return pay; };
    spec.effort_cost = [zeta, N](double a) { return zeta * N * a; };
    spec.end_pay_utility = [](double c) { return c; };
    spec.end_pay_inverse = [](double w) { return w; };
    spec.control_set = p.control_levels;
    spec.payment_set = p.payment_levels;
    spec.horizon = p.horizon;
    spec.participation_payoff = p.participation;
    spec.y0 = p.y_init;
    spec.validate();
    return spec;
}

}  // namespace pacs::loadcontrol
