#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "pacs/grid.hpp"
#include "pacs/model.hpp"

namespace pacs {

/// Parsed run configuration. The JSON schema is documented in the README;
/// every field has a default, and the grid section may be "auto".
struct RunConfig {
    nlohmann::json raw;
    ModelSpec model;
    std::uint64_t model_hash = 0;

    bool grid_auto = true;
    int n_w = 41;
    int n_y = 45;
    int n_t = 0;  // 0 = derive from the stability bounds
    double cfl_fraction = 0.4;
    Grid explicit_grid;  // used when grid_auto is false

    int n_paths = 10000;
    int n_steps = 0;  // 0 = solver n_t
    std::uint64_t base_seed = 20240901;
    int write_paths = 3;

    double tolerance_floor = 1e-9;
    int n_switch_times = 3;

    std::string out_dir = "out";
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

/// Fingerprint of the model section; stored in value-field artifacts so a
/// stale artifact can never be replayed against a different model.
std::uint64_t hash_model_section(const nlohmann::json& model_section);

Grid resolve_grid(const RunConfig& cfg, const ThetaTable& table);

/// The packaged load-control example configuration.
nlohmann::json example_config();

}  // namespace pacs
