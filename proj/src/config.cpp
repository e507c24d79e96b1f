#include "pacs/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>

#include "pacs/errors.hpp"
#include "pacs/loadcontrol.hpp"
#include "pacs/timeseries.hpp"
#include "pacs/util.hpp"

namespace pacs {
namespace {

using nlohmann::json;

double num(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

std::vector<double> level_set(const json& j, const char* what) {
    std::vector<double> out;
    if (j.is_array()) {
        out = j.get<std::vector<double>>();
    } else if (j.is_object()) {
        const double lo = j.at("min").get<double>();
        const double hi = j.at("max").get<double>();
        const int n = j.at("count").get<int>();
        if (n < 1) throw ParseError(std::string(what) + ": count must be >= 1");
        for (int k = 0; k < n; ++k)
            out.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
    } else {
        throw ParseError(std::string(what) + ": expected array or {min,max,count}");
    }
    return out;
}

/// Scalar function families selectable by name.
std::function<double(double)> scalar_family(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("family"))
        throw ParseError(std::string(what) + ": expected {\"family\": ...}");
    const std::string family = j.at("family").get<std::string>();
    if (family == "constant") {
        const double c = num(j, "c", 0.0);
        return [c](double) { return c; };
    }
    if (family == "linear") {
        const double c0 = num(j, "c0", 0.0), c1 = num(j, "c1", 1.0);
        return [c0, c1](double x) { return c0 + c1 * x; };
    }
    if (family == "quadratic") {
        const double c0 = num(j, "c0", 0.0), c1 = num(j, "c1", 0.0), c2 = num(j, "c2", 1.0);
        return [c0, c1, c2](double x) { return c0 + c1 * x + c2 * x * x; };
    }
    if (family == "exponential_band") {
        const double eta1 = num(j, "eta1", 1.0), eta2 = num(j, "eta2", 1.0);
        const double lo = num(j, "lo", 0.0), hi = num(j, "hi", 1.0);
        return [eta1, eta2, lo, hi](double x) {
            return -eta1 * (std::exp(eta2 * (x - hi)) + std::exp(eta2 * (lo - x)));
        };
    }
    throw ParseError(std::string(what) + ": unknown family '" + family + "'");
}

TimeSeries series_from(const json& j, double horizon, const char* what,
                       TimeSeries (*fallback)(double)) {
    if (j.is_null() || (j.is_string() && j.get<std::string>() == "default")) return fallback(horizon);
    if (j.is_object() && j.contains("csv")) {
        const std::string col = j.contains("column") ? j.at("column").get<std::string>() : "lambda";
        return load_series_csv(j.at("csv").get<std::string>(), col);
    }
    if (j.is_object() && j.contains("t") && j.contains("v"))
        return TimeSeries(j.at("t").get<std::vector<double>>(), j.at("v").get<std::vector<double>>());
    throw ParseError(std::string(what) + ": expected \"default\", {csv[, column]}, or {t, v}");
}

ModelSpec build_generic_model(const json& m) {
    ModelSpec spec;
    spec.revenue_vol = num(m, "sigma", 0.0);
    spec.horizon = num(m, "horizon", 1.0);
    spec.participation_payoff = num(m, "participation", 0.0);
    spec.y0 = num(m, "y0", 0.0);
    spec.control_set = level_set(m.at("control_set"), "control_set");
    spec.payment_set = level_set(m.at("payment_set"), "payment_set");

    auto drift = scalar_family(m.value("revenue_drift", json{{"family", "linear"}}), "revenue_drift");
    spec.revenue_drift = [drift](double, double a) { return drift(a); };

    const json rhs = m.value("system_rhs", json{{"family", "affine"}, {"c0", 0.0}, {"cy", 0.0}, {"ca", 0.0}});
    if (!rhs.contains("family") || rhs.at("family").get<std::string>() != "affine")
        throw ParseError("system_rhs: only the 'affine' family (c0 + cy*y + ca*a) is supported");
    {
        const double c0 = num(rhs, "c0", 0.0), cy = num(rhs, "cy", 0.0), ca = num(rhs, "ca", 0.0);
        spec.system_rhs = [c0, cy, ca](double, double y, double a) { return c0 + cy * y + ca * a; };
    }

    const json rp = m.value("principal_running_reward", json::object());
    auto rp_y = rp.contains("y") ? scalar_family(rp.at("y"), "principal_running_reward.y")
                                 : std::function<double(double)>([](double) { return 0.0; });
    auto rp_p = rp.contains("p") ? scalar_family(rp.at("p"), "principal_running_reward.p")
                                 : std::function<double(double)>([](double) { return 0.0; });
    spec.principal_running_reward = [rp_y, rp_p](double y, double p) { return rp_y(y) + rp_p(p); };

    spec.principal_terminal_reward =
        m.contains("principal_terminal_reward")
            ? scalar_family(m.at("principal_terminal_reward"), "principal_terminal_reward")
            : std::function<double(double)>([](double) { return 0.0; });
    spec.agent_pay_utility = m.contains("agent_pay_utility")
                                 ? scalar_family(m.at("agent_pay_utility"), "agent_pay_utility")
                                 : std::function<double(double)>([](double p) { return p; });
    spec.effort_cost = m.contains("effort_cost") ? scalar_family(m.at("effort_cost"), "effort_cost")
                                                 : std::function<double(double)>([](double) { return 0.0; });

    const json g = m.value("end_pay_utility", json{{"family", "identity"}});
    const std::string gf = g.at("family").get<std::string>();
    if (gf == "identity") {
        spec.end_pay_utility = [](double c) { return c; };
        spec.end_pay_inverse = [](double w) { return w; };
    } else if (gf == "linear") {
        const double c0 = num(g, "c0", 0.0), c1 = num(g, "c1", 1.0);
        if (c1 <= 0.0) throw ParseError("end_pay_utility: linear family needs c1 > 0");
        spec.end_pay_utility = [c0, c1](double c) { return c0 + c1 * c; };
        spec.end_pay_inverse = [c0, c1](double w) { return (w - c0) / c1; };
    } else {
        throw ParseError("end_pay_utility: unknown family '" + gf + "'");
    }
    return spec;
}

ModelSpec build_loadcontrol_model(const json& m) {
    loadcontrol::LoadControlParams p = loadcontrol::default_instance();
    const json params = m.value("params", json::object());
    p.n_customers = static_cast<int>(num(params, "n_customers", p.n_customers));
    p.tariff = num(params, "tariff", p.tariff);
    p.vol = num(params, "sigma", p.vol);
    p.band_low = num(params, "band_low", p.band_low);
    p.band_high = num(params, "band_high", p.band_high);
    p.penalty_scale = num(params, "eta1", p.penalty_scale);
    p.penalty_sharpness = num(params, "eta2", p.penalty_sharpness);
    p.thermal_coupling = num(params, "alpha", p.thermal_coupling);
    p.cooling_rate = num(params, "kappa", p.cooling_rate);
    p.y_init = num(params, "y0", p.y_init);
    p.participation = num(params, "participation", p.participation);
    p.horizon = num(params, "horizon", p.horizon);
    if (params.contains("control_levels"))
        p.control_levels = level_set(params.at("control_levels"), "control_levels");
    if (params.contains("payment_levels"))
        p.payment_levels = level_set(params.at("payment_levels"), "payment_levels");
    if (params.contains("price"))
        p.price_series = series_from(params.at("price"), p.horizon, "price",
                                     &loadcontrol::default_price_series);
    else
        p.price_series = loadcontrol::default_price_series(p.horizon);
    if (params.contains("outdoor"))
        p.outdoor_series = series_from(params.at("outdoor"), p.horizon, "outdoor",
                                       &loadcontrol::default_outdoor_series);
    else
        p.outdoor_series = loadcontrol::default_outdoor_series(p.horizon);
    return loadcontrol::build_model(p);
}

}  // namespace

std::uint64_t hash_model_section(const nlohmann::json& model_section) {
    return fnv1a64(model_section.dump());
}

RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.raw = j;
    if (!j.contains("model")) throw ParseError("config: missing 'model' section");
    const json& m = j.at("model");
    const std::string family = m.value("family", std::string("generic"));
    if (family == "loadcontrol")
        cfg.model = build_loadcontrol_model(m);
    else if (family == "generic")
        cfg.model = build_generic_model(m);
    else
        throw ParseError("config: unknown model family '" + family + "'");
    cfg.model.validate();
    cfg.model_hash = hash_model_section(m);

    const json g = j.value("grid", json::object());
    if (g.is_string() && g.get<std::string>() == "auto") {
        cfg.grid_auto = true;
    } else if (g.is_object()) {
        cfg.n_w = static_cast<int>(num(g, "n_w", cfg.n_w));
        cfg.n_y = static_cast<int>(num(g, "n_y", cfg.n_y));
        cfg.n_t = static_cast<int>(num(g, "n_t", cfg.n_t));
        cfg.cfl_fraction = num(g, "cfl_fraction", cfg.cfl_fraction);
        cfg.grid_auto = !(g.contains("w_min") || g.contains("w_max") || g.contains("y_min") ||
                          g.contains("y_max"));
        if (!cfg.grid_auto) {
            Grid eg;
            eg.w_min = g.at("w_min").get<double>();
            eg.w_max = g.at("w_max").get<double>();
            eg.y_min = g.at("y_min").get<double>();
            eg.y_max = g.at("y_max").get<double>();
            eg.n_w = cfg.n_w;
            eg.n_y = cfg.n_y;
            eg.n_t = cfg.n_t > 0 ? cfg.n_t : 1;
            eg.t_max = cfg.model.horizon;
            cfg.explicit_grid = eg;
        }
    }

    const json s = j.value("simulation", json::object());
    cfg.n_paths = static_cast<int>(num(s, "n_paths", cfg.n_paths));
    cfg.n_steps = static_cast<int>(num(s, "n_steps", cfg.n_steps));
    if (s.contains("base_seed")) cfg.base_seed = s.at("base_seed").get<std::uint64_t>();
    cfg.write_paths = static_cast<int>(num(s, "write_paths", cfg.write_paths));

    const json v = j.value("verify", json::object());
    cfg.tolerance_floor = num(v, "tolerance_floor", cfg.tolerance_floor);
    cfg.n_switch_times = static_cast<int>(num(v, "n_switch_times", cfg.n_switch_times));

    const json o = j.value("output", json::object());
    if (o.contains("directory")) cfg.out_dir = o.at("directory").get<std::string>();
    if (const char* env = std::getenv("PACS_OUT_DIR")) cfg.out_dir = env;
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return parse_config(j);
}

Grid resolve_grid(const RunConfig& cfg, const ThetaTable& table) {
    if (!cfg.grid_auto) return cfg.explicit_grid;
    return auto_grid(cfg.model, table, cfg.n_w, cfg.n_y, cfg.n_t, cfg.cfl_fraction);
}

nlohmann::json example_config() {
    return nlohmann::json{
        {"model", {{"family", "loadcontrol"}, {"params", nlohmann::json::object()}}},
        {"grid", {{"n_w", 41}, {"n_y", 45}}},
        {"simulation", {{"n_paths", 10000}, {"base_seed", 20240901}, {"write_paths", 3}}},
        {"verify", {{"tolerance_floor", 1e-9}, {"n_switch_times", 3}}},
        {"output", {{"directory", "out/example"}}},
    };
}

}  // namespace pacs
