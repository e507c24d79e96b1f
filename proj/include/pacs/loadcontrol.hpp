#pragma once

#include <vector>

#include "pacs/model.hpp"
#include "pacs/timeseries.hpp"

namespace pacs::loadcontrol {

/// Indirect load control of N identical air conditioners under a real-time
/// balancing price, a thermal comfort band, and a linear tariff.
///
/// Units: time in hours, per-customer power in kW, temperatures in deg C,
/// payments in currency per hour. vol is taken in revenue units per
/// sqrt(hour).
struct LoadControlParams {
    int n_customers = 1000;          // N
    double tariff = 0.2;             // zeta, per kWh
    TimeSeries price_series;         // lambda_t; default_price_series(T) if empty
    double vol = 200.0;              // sigma
    double band_low = 18.0;          // y underbar
    double band_high = 22.5;         // y overbar
    double penalty_scale = 10.0;     // eta_1
    double penalty_sharpness = 5.0;  // eta_2
    double thermal_coupling = 0.5;   // alpha, 1/h (not pinned by the source data; configurable)
    double cooling_rate = 1.0;       // kappa, deg C per kWh
    TimeSeries outdoor_series;       // Theta_t; default_outdoor_series(T) if empty
    double y_init = 22.5;
    double participation = -100.0;   // b = -0.1 N
    std::vector<double> control_levels = {0.0, 2.0};  // per-customer kW (ON/OFF)
    std::vector<double> payment_levels;               // default: [0, 0.2] in 11 levels
    double horizon = 8.0;                             // 10am - 6pm
};

/// The simulation instance with every documented default filled in.
LoadControlParams default_instance();

/// Assembles the ModelSpec:
///   mu(t,a)  = (zeta - lambda_t) N a
///   f(t,y,a) = alpha (Theta_t - y) - kappa a
///   h(a)     = zeta N a
///   r^P(y,p) = -eta1 [exp(eta2 (y - hi)) + exp(eta2 (lo - y))] - p
///   r^A(p)   = p,  g = id,  q = 0.
/// Throws InvalidParams naming the violated invariant.
ModelSpec build_model(const LoadControlParams& params);

/// Synthetic balancing price: low in the morning, single peak near 4pm
/// (t = 6 h into a 10am start), declining after. Closed form
///   lambda(t) = base + amp * exp(-((t - peak_frac*T) / width)^2)
/// with base = 0.05, amp = 0.14, width = 1.2 h, peak_frac = 0.75, sampled
/// every 0.25 h. The peak stays below the tariff so the recommended control
/// is never one the agent would pay to deviate from.
TimeSeries default_price_series(double horizon);

/// Outdoor temperature: 23.5 + sin(pi t / T), peaking mid-afternoon above the
/// band top. Base and amplitude are chosen so that full-power cooling can
/// still pull the indoor temperature about two degrees below the band top at
/// the hottest hour (pre-cooling headroom).
TimeSeries default_outdoor_series(double horizon);

}  // namespace pacs::loadcontrol
