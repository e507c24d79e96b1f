// pacsolve: solve / simulate / verify / example pipeline for dynamic
// principal-agent contracts under partial observation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pacs/artifact.hpp"
#include "pacs/config.hpp"
#include "pacs/contract_engine.hpp"
#include "pacs/errors.hpp"
#include "pacs/hjb_solver.hpp"
#include "pacs/ic_verifier.hpp"
#include "pacs/loadcontrol.hpp"
#include "pacs/rng.hpp"
#include "pacs/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitStaleArtifact = 4;
constexpr int kExitIcViolation = 5;

struct CliError {
    int code;
    std::string message;
};

pacs::Grid coarsen(const pacs::Grid& g) {
    pacs::Grid c = g;
    c.n_w = std::max(3, (g.n_w + 1) / 2);
    c.n_y = std::max(3, (g.n_y + 1) / 2);
    c.n_t = std::max(1, (g.n_t + 1) / 2);
    return c;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

json grid_json(const pacs::Grid& g) {
    return json{{"w_min", g.w_min}, {"w_max", g.w_max}, {"n_w", g.n_w},
                {"y_min", g.y_min}, {"y_max", g.y_max}, {"n_y", g.n_y},
                {"n_t", g.n_t},     {"t_max", g.t_max}};
}

pacs::ValueField do_solve(const pacs::RunConfig& cfg, const fs::path& out_dir, bool quiet = false) {
    const pacs::ThetaTable table = pacs::build_theta_table(cfg.model);
    const pacs::Grid grid = pacs::resolve_grid(cfg, table);
    pacs::ValueField field = pacs::solve(cfg.model, grid);

    fs::create_directories(out_dir);
    pacs::save_field((out_dir / "field.pacf").string(), field, cfg.model_hash);

    // Convergence diagnostics: the production grid plus two coarsenings.
    const pacs::Grid c1 = coarsen(grid);
    const pacs::Grid c2 = coarsen(c1);
    const pacs::ConvergenceReport rep =
        pacs::convergence_report(cfg.model, {c2, c1, grid});
    {
        std::ofstream out(out_dir / "convergence.csv");
        out << "n_w,n_y,n_t,phi0\n";
        for (const auto& row : rep.rows)
            out << row.grid.n_w << "," << row.grid.n_y << "," << row.grid.n_t << ","
                << pacs::format_double(row.value) << "\n";
    }

    const double phi0 = field.interp_phi(0, cfg.model.participation_payoff, cfg.model.y0);
    if (!quiet) {
        std::cout << "phi(b, y0, 0) = " << pacs::format_double(phi0) << "\n";
        std::cout << "field: " << (out_dir / "field.pacf").string() << "\n";
    }
    return field;
}

pacs::ValueField load_checked_field(const pacs::RunConfig& cfg, const std::string& field_path) {
    pacs::LoadedField lf = pacs::load_field(field_path);
    if (lf.model_hash != cfg.model_hash)
        throw pacs::ArtifactMismatch(field_path + ": artifact model hash does not match the config");
    return std::move(lf.field);
}

pacs::EnsembleSummary do_simulate(const pacs::RunConfig& cfg, const pacs::ValueField& field,
                                  const fs::path& out_dir, bool quiet = false) {
    fs::create_directories(out_dir);
    const pacs::EnsembleSummary s =
        pacs::ensemble(field, cfg.model, cfg.n_paths, cfg.base_seed, cfg.n_steps);

    write_json(out_dir / "ensemble.json",
               json{{"n_paths", s.n_paths},
                    {"n_steps", s.n_steps},
                    {"base_seed", s.base_seed},
                    {"principal_mean", s.principal_mean},
                    {"principal_se", s.principal_se},
                    {"agent_mean", s.agent_mean},
                    {"agent_se", s.agent_se},
                    {"end_pay_mean", s.end_pay_mean}});

    const int n_steps = cfg.n_steps > 0 ? cfg.n_steps : field.grid.n_t;
    for (int k = 0; k < cfg.write_paths; ++k) {
        const pacs::ContractPath p =
            pacs::synthesize_path(field, cfg.model, pacs::derive_seed(cfg.base_seed, k), n_steps);
        pacs::write_path_csv((out_dir / ("path_" + std::to_string(k) + ".csv")).string(), p);
    }
    if (!quiet) {
        std::cout << "principal payoff: " << pacs::format_double(s.principal_mean) << " +- "
                  << pacs::format_double(s.principal_se) << "\n";
        std::cout << "agent payoff:     " << pacs::format_double(s.agent_mean) << " +- "
                  << pacs::format_double(s.agent_se) << "\n";
    }
    return s;
}

bool do_verify(const pacs::RunConfig& cfg, const pacs::ValueField& field, const fs::path& out_dir,
               bool quiet = false) {
    fs::create_directories(out_dir);
    pacs::VerifyOptions opts;
    opts.n_paths = cfg.n_paths;
    opts.base_seed = cfg.base_seed;
    opts.n_switch_times = cfg.n_switch_times;
    opts.tolerance_floor = cfg.tolerance_floor;
    const pacs::DeviationReport rep = pacs::run_verification(field, cfg.model, opts);

    json strategies = json::array();
    for (const auto& s : rep.strategy_table)
        strategies.push_back(json{{"name", s.name}, {"mean", s.mean}, {"se", s.se}});
    write_json(out_dir / "deviation.json",
               json{{"best_response_value", rep.best_response_value},
                    {"recommended_value", rep.recommended_value},
                    {"pointwise_violation", rep.pointwise_violation},
                    {"tolerance", rep.tolerance},
                    {"passed", rep.passed},
                    {"strategies", strategies}});

    if (!quiet) {
        std::printf("best response:  %.6g (b = %.6g, tol = %.3g)\n", rep.best_response_value,
                    cfg.model.participation_payoff, rep.tolerance);
        std::printf("recommended:    %.6g\n", rep.recommended_value);
        std::printf("pointwise IC:   %.3g\n", rep.pointwise_violation);
        std::printf("%-24s %14s %12s\n", "strategy", "mean", "se");
        for (const auto& s : rep.strategy_table)
            std::printf("%-24s %14.4f %12.4f\n", s.name.c_str(), s.mean, s.se);
        std::printf("verdict: %s\n", rep.passed ? "INCENTIVE COMPATIBLE" : "IC VIOLATION");
    }
    return rep.passed;
}

int run_example(const std::string& out_override) {
    pacs::RunConfig cfg = pacs::parse_config(pacs::example_config());
    if (!out_override.empty()) cfg.out_dir = out_override;
    const fs::path out_dir = cfg.out_dir;
    fs::create_directories(out_dir);

    // Plot-ready inputs.
    pacs::save_series_csv((out_dir / "price.csv").string(),
                          pacs::loadcontrol::default_price_series(cfg.model.horizon), "lambda");
    pacs::save_series_csv((out_dir / "outdoor.csv").string(),
                          pacs::loadcontrol::default_outdoor_series(cfg.model.horizon), "theta");

    const pacs::ValueField field = do_solve(cfg, out_dir);
    const pacs::EnsembleSummary summary = do_simulate(cfg, field, out_dir);

    // Band occupancy and total compensation summary over the written paths.
    const int n_steps = field.grid.n_t;
    const double lo = 18.0 - 0.5, hi = 22.5 + 0.5;
    double occupancy = 0.0, total_comp = 0.0;
    const int n_report_paths = std::max(1, cfg.write_paths);
    for (int k = 0; k < n_report_paths; ++k) {
        const pacs::ContractPath p =
            pacs::synthesize_path(field, cfg.model, pacs::derive_seed(cfg.base_seed, k), n_steps);
        int in_band = 0;
        double comp = p.end_pay;
        for (double y : p.y_star)
            if (y >= lo && y <= hi) ++in_band;
        for (size_t s = 0; s < p.pi_star.size(); ++s) comp += p.pi_star[s] * cfg.model.horizon / n_steps;
        occupancy += static_cast<double>(in_band) / static_cast<double>(p.y_star.size());
        total_comp += comp;
    }
    occupancy /= n_report_paths;
    total_comp /= n_report_paths;
    write_json(out_dir / "summary.json", json{{"band_occupancy", occupancy},
                                              {"mean_total_compensation", total_comp},
                                              {"principal_mean", summary.principal_mean},
                                              {"agent_mean", summary.agent_mean},
                                              {"grid", grid_json(field.grid)}});
    std::cout << "band occupancy: " << pacs::format_double(occupancy) << "\n";

    const bool ic_ok = do_verify(cfg, field, out_dir);
    return ic_ok ? 0 : kExitIcViolation;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Optimal dynamic principal-agent contracts under partial observation"};
    app.require_subcommand(1);

    std::string config_path, field_path, out_override;

    auto* solve_cmd = app.add_subcommand("solve", "solve the HJB and write the value-field artifact");
    solve_cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    solve_cmd->add_option("--out", out_override, "output directory override");

    auto* sim_cmd = app.add_subcommand("simulate", "synthesize contract paths from a solved field");
    sim_cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    sim_cmd->add_option("--field", field_path, "value-field artifact")->required();
    sim_cmd->add_option("--out", out_override, "output directory override");

    auto* verify_cmd = app.add_subcommand("verify", "verify incentive compatibility of a solved field");
    verify_cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    verify_cmd->add_option("--field", field_path, "value-field artifact")->required();
    verify_cmd->add_option("--out", out_override, "output directory override");

    auto* example_cmd = app.add_subcommand("example", "run the packaged indirect-load-control instance");
    example_cmd->add_option("--out", out_override, "output directory override");

    CLI11_PARSE(app, argc, argv);

    if (example_cmd->parsed()) return run_example(out_override);

    pacs::RunConfig cfg;
    try {
        cfg = pacs::load_config_file(config_path);
    } catch (const std::exception& e) {
        throw CliError{kExitConfig, e.what()};
    }
    const fs::path out_dir = out_override.empty() ? fs::path(cfg.out_dir) : fs::path(out_override);

    if (solve_cmd->parsed()) {
        do_solve(cfg, out_dir);
        return 0;
    }
    if (sim_cmd->parsed()) {
        const pacs::ValueField field = load_checked_field(cfg, field_path);
        do_simulate(cfg, field, out_dir);
        return 0;
    }
    // verify
    const pacs::ValueField field = load_checked_field(cfg, field_path);
    return do_verify(cfg, field, out_dir) ? 0 : kExitIcViolation;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const pacs::ArtifactMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStaleArtifact;
    } catch (const pacs::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pacs::InvalidParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        // CflViolation, NonFiniteValue, GridEscape, OutOfBounds, ...
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}
