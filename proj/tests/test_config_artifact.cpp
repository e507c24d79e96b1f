#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "helpers.hpp"
#include "pacs/artifact.hpp"
#include "pacs/config.hpp"
#include "pacs/errors.hpp"
#include "pacs/hjb_solver.hpp"

using namespace pacs;
using nlohmann::json;

namespace {

json trivial_config() {
    return json{{"model",
                 {{"family", "generic"},
                  {"sigma", 0.0},
                  {"horizon", 1.0},
                  {"participation", 0.25},
                  {"control_set", json::array({0.0})},
                  {"payment_set", json::array({0.0})}}}};
}

}  // namespace

TEST_CASE("trivial generic config solves to phi(b, y0, 0) = -b") {
    const RunConfig cfg = parse_config(trivial_config());
    const ThetaTable table = build_theta_table(cfg.model);
    const Grid g = resolve_grid(cfg, table);
    const double v = solve_value_at_start(cfg.model, g);
    CHECK(v == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("config parsing: defaults, sections, and level-set expansion") {
    json j = trivial_config();
    j["model"]["payment_set"] = json{{"min", 0.0}, {"max", 0.2}, {"count", 11}};
    j["simulation"] = {{"n_paths", 77}, {"base_seed", 5}};
    j["verify"] = {{"tolerance_floor", 1e-6}};
    j["output"] = {{"directory", "somewhere"}};
    const RunConfig cfg = parse_config(j);
    CHECK(cfg.model.payment_set.size() == 11);
    CHECK(cfg.model.payment_set[1] == doctest::Approx(0.02));
    CHECK(cfg.n_paths == 77);
    CHECK(cfg.base_seed == 5);
    CHECK(cfg.tolerance_floor == 1e-6);
    CHECK(cfg.out_dir == "somewhere");
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_config(json::object()), ParseError);  // no model

    json j = trivial_config();
    j["model"]["family"] = "nonsense";
    CHECK_THROWS_AS(parse_config(j), ParseError);

    j = trivial_config();
    j["model"]["payment_set"] = "not-a-set";
    CHECK_THROWS_AS(parse_config(j), ParseError);

    j = trivial_config();
    j["model"]["end_pay_utility"] = {{"family", "linear"}, {"c1", -1.0}};
    CHECK_THROWS_AS(parse_config(j), ParseError);
}

TEST_CASE("model hash is stable and sensitive") {
    const json a = trivial_config();
    json b = a;
    b["model"]["participation"] = 0.3;
    CHECK(hash_model_section(a.at("model")) == hash_model_section(a.at("model")));
    CHECK(hash_model_section(a.at("model")) != hash_model_section(b.at("model")));
    // non-model sections do not affect the hash
    json c = a;
    c["simulation"] = {{"n_paths", 5}};
    CHECK(hash_model_section(c.at("model")) == hash_model_section(a.at("model")));
}

TEST_CASE("example config parses and targets the load-control instance") {
    const RunConfig cfg = parse_config(example_config());
    CHECK(cfg.model.participation_payoff == -100.0);
    CHECK(cfg.model.horizon == 8.0);
    CHECK(cfg.model.control_set == std::vector<double>{0.0, 2.0});
    CHECK(cfg.model.effort_cost(2.0) == doctest::Approx(400.0));
}

TEST_CASE("artifact round-trip is bit exact") {
    const ModelSpec spec = testing::small_hazard_spec();
    const Grid g = testing::small_hazard_grid(11, 11, 16);
    const ValueField f = solve(spec, g);
    const char* path = "roundtrip.pacf";
    save_field(path, f, 0xdeadbeefULL);
    const LoadedField lf = load_field(path);
    CHECK(lf.model_hash == 0xdeadbeefULL);
    CHECK(lf.field.grid.same_shape(f.grid));
    CHECK(lf.field.phi == f.phi);
    CHECK(lf.field.policy_u == f.policy_u);
    CHECK(lf.field.policy_pi == f.policy_pi);
    CHECK(lf.field.theta.thetas() == f.theta.thetas());
    std::remove(path);
}

TEST_CASE("artifact loader rejects malformed files") {
    const char* path = "garbage.pacf";
    {
        std::ofstream out(path, std::ios::binary);
        out << "this is not an artifact";
    }
    CHECK_THROWS_AS(load_field(path), ParseError);
    std::remove(path);
    CHECK_THROWS_AS(load_field("does_not_exist.pacf"), ParseError);
}

TEST_CASE("truncated artifact is rejected") {
    const ModelSpec spec = testing::small_hazard_spec();
    const ValueField f = solve(spec, testing::small_hazard_grid(11, 11, 16));
    const char* full_path = "full.pacf";
    const char* cut_path = "cut.pacf";
    save_field(full_path, f, 1);
    {
        std::ifstream in(full_path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream out(cut_path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_AS(load_field(cut_path), ParseError);
    std::remove(full_path);
    std::remove(cut_path);
}
