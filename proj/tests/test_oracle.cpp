#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracle_dp.hpp"
#include "pacs/hjb_solver.hpp"

using namespace pacs;

TEST_CASE("solver matches the trinomial chain oracle on the hazard instance") {
    const ModelSpec spec = testing::small_hazard_spec();
    const Grid g = testing::small_hazard_grid();
    const double solver = solve_value_at_start(spec, g);
    const double oracle = testing::oracle_value_at_start(spec, g);
    CHECK(std::abs(solver - oracle) <= 0.02 * (1.0 + std::abs(oracle)));
}

TEST_CASE("solver matches the oracle on a degenerate no-noise instance") {
    ModelSpec spec = testing::small_hazard_spec();
    spec.revenue_vol = 0.0;
    const Grid g = testing::small_hazard_grid();
    const double solver = solve_value_at_start(spec, g);
    const double oracle = testing::oracle_value_at_start(spec, g);
    CHECK(std::abs(solver - oracle) <= 0.02 * (1.0 + std::abs(oracle)));
}

TEST_CASE("oracle gap shrinks under refinement") {
    const ModelSpec spec = testing::small_hazard_spec();
    const Grid coarse = testing::small_hazard_grid(11, 11, 14);
    const Grid fine = testing::small_hazard_grid(41, 41, 200);
    const double gap_coarse =
        std::abs(solve_value_at_start(spec, coarse) - testing::oracle_value_at_start(spec, coarse));
    const double gap_fine =
        std::abs(solve_value_at_start(spec, fine) - testing::oracle_value_at_start(spec, fine));
    CHECK(gap_fine <= gap_coarse + 1e-12);
}
