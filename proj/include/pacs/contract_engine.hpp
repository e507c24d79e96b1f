#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pacs/hjb_solver.hpp"

namespace pacs {

/// One realized contract trajectory. State samples (times, x, w_star, y_star)
/// have n_steps+1 entries; per-step series (u_star, pi_star, xi) have n_steps.
struct ContractPath {
    std::vector<double> times;
    std::vector<double> x;
    std::vector<double> w_star;
    std::vector<double> y_star;
    std::vector<double> u_star;
    std::vector<double> pi_star;
    std::vector<double> xi;
    double end_pay = 0.0;  // C* = g^{-1}(w*_T)
    std::uint64_t noise_seed = 0;
};

/// Control actually exerted by the agent at (t, step); used by the deviation
/// simulations. The principal's bookkeeping always follows the recommendation.
using ControlSchedule = std::function<double(double t, int step)>;

struct SimResult {
    ContractPath path;
    double agent_payoff = 0.0;      // sum (r^A(pi*) - h(a)) dt + g(C*)
    double principal_payoff = 0.0;  // sum (mu(t,a) + r^P(y*,pi*)) dt + q(y*_T) - C*
};

/// Euler-Maruyama forward pass with step T/n_steps. Per step: feedback
/// (u*, pi*) from policy_at, then
///   dx  = mu(t, a) dt + sigma sqrt(dt) Z
///   dw* = -(r^A(pi*) - h(u*)) dt + theta(u*) (dx - mu(t, u*) dt)
///   dy* = f(t, y*, u*) dt
/// where a is the deviation control when given, u* otherwise. Identical seeds
/// give bit-identical results. Throws GridEscape with the offending step when
/// (w*, y*) leaves the grid.
SimResult simulate_contract(const ValueField& field, const ModelSpec& spec, std::uint64_t seed,
                            int n_steps, const ControlSchedule* deviation = nullptr);

ContractPath synthesize_path(const ValueField& field, const ModelSpec& spec, std::uint64_t seed,
                             int n_steps);

struct EnsembleSummary {
    int n_paths = 0;
    int n_steps = 0;
    std::uint64_t base_seed = 0;
    double principal_mean = 0.0;
    double principal_se = 0.0;
    double agent_mean = 0.0;
    double agent_se = 0.0;
    double end_pay_mean = 0.0;
};

/// n_paths independent paths with seeds derive_seed(base_seed, k), simulated
/// in parallel and reduced by path index.
EnsembleSummary ensemble(const ValueField& field, const ModelSpec& spec, int n_paths,
                         std::uint64_t base_seed, int n_steps = 0,
                         const ControlSchedule* deviation = nullptr);

/// Columns: t,x,w_star,y_star,u_star,pi_star,xi. The final row repeats the
/// last step's controls next to the terminal state.
void write_path_csv(const std::string& path, const ContractPath& p);

}  // namespace pacs
