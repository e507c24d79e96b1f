#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pacs/contract_engine.hpp"
#include "pacs/hjb_solver.hpp"

namespace pacs {

struct DeviationStrategy {
    std::string name;
    ControlSchedule schedule;  // empty = follow the recommendation
};

struct StrategyResult {
    std::string name;
    double mean = 0.0;
    double se = 0.0;
};

struct DeviationReport {
    double best_response_value = 0.0;
    double recommended_value = 0.0;
    double pointwise_violation = 0.0;
    std::vector<StrategyResult> strategy_table;
    double tolerance = 0.0;
    bool passed = false;
};

/// Agent's optimal deviation payoff: solves the agent's HJB backward over the
/// principal's bookkeeping pair (w*, y*) with the contract's feedback maps
/// frozen. The bookkeeping drifts with the recommendation (the principal
/// cannot observe the deviation); only the innovation term and the effort
/// cost see the deviation control. Sub-steps each policy interval as needed
/// to keep the explicit scheme stable. Returns the value at (b, y0, 0).
double agent_best_response(const ValueField& field, const ModelSpec& spec, const Grid& grid);

/// Fixed, documented deviation family: follow, each constant control, lazy
/// (always min), and one-switch bang-bang at n_switch_times interior times.
std::vector<DeviationStrategy> default_strategies(const ModelSpec& spec, int n_switch_times = 3);

/// Monte Carlo payoff of each strategy under the true (deviated) revenue
/// drift, with the principal's bookkeeping computed from observed x exactly
/// as in simulate_contract. Shares per-path seeds across strategies.
std::vector<StrategyResult> deviation_mc(const ValueField& field, const ModelSpec& spec,
                                         const std::vector<DeviationStrategy>& strategies, int n_paths,
                                         std::uint64_t base_seed, int n_steps = 0);

/// max over stored-policy nodes of
///   max_a {-h(a) + theta(u*) a} - (-h(u*) + theta(u*) u*).
/// Zero whenever the field's sensitivities came from theta().
double pointwise_ic_check(const ValueField& field, const ModelSpec& spec);

struct VerifyOptions {
    int n_paths = 10000;
    std::uint64_t base_seed = 20240901;
    int n_switch_times = 3;
    double tolerance_floor = 1e-9;
    /// When set, the discretization part of the tolerance is derived from a
    /// half-resolution re-solve of both the principal's and the agent's DP.
    bool estimate_discretization_gap = true;
};

/// Full incentive-compatibility check: pointwise IC, agent best response vs b, and the
/// Monte Carlo deviation table. `passed` requires all three within tolerance.
DeviationReport run_verification(const ValueField& field, const ModelSpec& spec,
                                 const VerifyOptions& opts = {});

}  // namespace pacs
