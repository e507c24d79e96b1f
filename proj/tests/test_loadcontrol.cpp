#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "pacs/errors.hpp"
#include "pacs/loadcontrol.hpp"
#include "pacs/model.hpp"
#include "pacs/timeseries.hpp"

using namespace pacs;
using namespace pacs::loadcontrol;

TEST_CASE("effort cost and sensitivities of the packaged instance") {
    const LoadControlParams p = default_instance();
    const ModelSpec spec = build_model(p);
    CHECK(spec.effort_cost(2.0) == doctest::Approx(400.0));  // zeta N u = 0.2*1000*2
    const ThetaTable t = build_theta_table(spec);
    CHECK(t.value_of(0.0) == 0.0);
    CHECK(t.value_of(2.0) == doctest::Approx(200.0).epsilon(1e-12));
}

TEST_CASE("band penalty spot value and symmetry") {
    const LoadControlParams p = default_instance();
    const ModelSpec spec = build_model(p);
    // midpoint of the band: both exponentials at eta2 * (-band_width/2)
    const double mid = 0.5 * (p.band_low + p.band_high);
    const double d = 0.5 * (p.band_high - p.band_low);
    const double expect = -p.penalty_scale * 2.0 * std::exp(-p.penalty_sharpness * d);
    CHECK(spec.principal_running_reward(mid, 0.0) == doctest::Approx(expect).epsilon(1e-12));
    // r^P(band_high + s, p) == r^P(band_low - s, p) for any excursion s
    for (double s : {0.1, 0.5, 1.3})
        CHECK(spec.principal_running_reward(p.band_high + s, 0.125) ==
              doctest::Approx(spec.principal_running_reward(p.band_low - s, 0.125)).epsilon(1e-12));
    // the payment enters linearly
    CHECK(spec.principal_running_reward(mid, 0.2) ==
          doctest::Approx(spec.principal_running_reward(mid, 0.0) - 0.2).epsilon(1e-12));
}

TEST_CASE("system dynamics: cooling pulls temperature down") {
    const LoadControlParams p = default_instance();
    const ModelSpec spec = build_model(p);
    const double f_off = spec.system_rhs(2.0, 22.0, 0.0);
    const double f_on = spec.system_rhs(2.0, 22.0, 2.0);
    CHECK(f_on == doctest::Approx(f_off - p.cooling_rate * 2.0).epsilon(1e-12));
    CHECK(f_off > 0.0);  // outdoors is hotter than 22 all day
}

TEST_CASE("default price series: morning low, peak near three quarters in") {
    const double T = 8.0;
    const TimeSeries lam = default_price_series(T);
    CHECK(lam(0.0) < lam(0.75 * T));
    // the peak sample sits at 0.75 T within one sample spacing
    double best_t = 0.0, best_v = -1.0;
    for (size_t i = 0; i < lam.times().size(); ++i)
        if (lam.values()[i] > best_v) {
            best_v = lam.values()[i];
            best_t = lam.times()[i];
        }
    CHECK(std::abs(best_t - 0.75 * T) <= 0.25 + 1e-12);
    // declining after the peak
    CHECK(lam(T) < best_v);
    // positive everywhere, and below the tariff
    for (double v : lam.values()) {
        CHECK(v > 0.0);
        CHECK(v < 0.2);
    }
}

TEST_CASE("default outdoor series stays above the band with cooling headroom") {
    const LoadControlParams p = default_instance();
    const TimeSeries th = default_outdoor_series(p.horizon);
    const double u_max = p.control_levels.back();
    for (size_t i = 0; i < th.times().size(); ++i) {
        CHECK(th.values()[i] > p.band_high);  // cooling demand exists all day
        // full-power equilibrium Theta - kappa u / alpha stays below band top
        CHECK(th.values()[i] - p.cooling_rate * u_max / p.thermal_coupling < p.band_high);
    }
}

TEST_CASE("series CSV round-trip is byte identical") {
    const TimeSeries lam = default_price_series(8.0);
    const char* p1 = "lc_series_a.csv";
    const char* p2 = "lc_series_b.csv";
    save_series_csv(p1, lam, "lambda");
    const TimeSeries back = load_series_csv(p1, "lambda");
    save_series_csv(p2, back, "lambda");
    std::ifstream a(p1), b(p2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    for (size_t i = 0; i < lam.values().size(); ++i) {
        CHECK(back.times()[i] == lam.times()[i]);
        CHECK(back.values()[i] == lam.values()[i]);
    }
    std::remove(p1);
    std::remove(p2);
}

TEST_CASE("series CSV loader rejects non-increasing times, naming the row") {
    const char* path = "lc_bad_series.csv";
    {
        std::ofstream out(path);
        out << "t,lambda\n0,0.1\n1,0.2\n1,0.3\n";
    }
    CHECK_THROWS_AS(load_series_csv(path, "lambda"), ParseError);
    try {
        load_series_csv(path, "lambda");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row") != std::string::npos);
    }
    std::remove(path);
}

TEST_CASE("series evaluation outside the sampled span throws CoverageError") {
    const TimeSeries lam = default_price_series(8.0);
    CHECK_THROWS_AS(lam(-0.5), CoverageError);
    CHECK_THROWS_AS(lam(8.5), CoverageError);
    CHECK(lam.covers(0.0, 8.0));
    CHECK_FALSE(lam.covers(0.0, 9.0));
}

TEST_CASE("builder rejects invalid parameters by name") {
    LoadControlParams p = default_instance();
    p.tariff = -0.1;
    CHECK_THROWS_AS(build_model(p), InvalidParams);

    p = default_instance();
    p.band_low = 23.0;  // above band_high
    CHECK_THROWS_AS(build_model(p), InvalidParams);

    p = default_instance();
    p.y_init = 30.0;  // outside (band_low, band_high]
    CHECK_THROWS_AS(build_model(p), InvalidParams);

    p = default_instance();
    p.price_series = TimeSeries({0.0, 1.0}, {0.1, 0.1});  // does not cover [0, T]
    CHECK_THROWS_AS(build_model(p), InvalidParams);
}

TEST_CASE("revenue drift carries the price spread") {
    const LoadControlParams p = default_instance();
    const ModelSpec spec = build_model(p);
    const double lam2 = p.price_series(2.0);
    CHECK(spec.revenue_drift(2.0, 2.0) ==
          doctest::Approx((p.tariff - lam2) * p.n_customers * 2.0).epsilon(1e-12));
    CHECK(spec.revenue_drift(2.0, 0.0) == 0.0);
}
