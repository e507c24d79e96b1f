#include "pacs/contract_engine.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>

#include "pacs/errors.hpp"
#include "pacs/rng.hpp"
#include "pacs/util.hpp"

namespace pacs {

SimResult simulate_contract(const ValueField& field, const ModelSpec& spec, std::uint64_t seed,
                            int n_steps, const ControlSchedule* deviation) {
    if (n_steps < field.grid.n_t)
        throw InvalidParams("simulate: n_steps must be >= the solver's n_t");
    const Grid& g = field.grid;
    const double T = spec.horizon;
    const double dt = T / n_steps;
    const double sqrt_dt = std::sqrt(dt);
    const double sig = spec.revenue_vol;

    SimResult r;
    ContractPath& p = r.path;
    p.noise_seed = seed;
    p.times.reserve(static_cast<size_t>(n_steps) + 1);
    p.x.reserve(static_cast<size_t>(n_steps) + 1);
    p.w_star.reserve(static_cast<size_t>(n_steps) + 1);
    p.y_star.reserve(static_cast<size_t>(n_steps) + 1);
    p.u_star.reserve(static_cast<size_t>(n_steps));
    p.pi_star.reserve(static_cast<size_t>(n_steps));
    p.xi.reserve(static_cast<size_t>(n_steps));

    SplitMix64 rng(seed);
    double x = 0.0;
    double w = spec.participation_payoff;  // w*_0 = b, exactly
    double y = spec.y0;
    p.times.push_back(0.0);
    p.x.push_back(x);
    p.w_star.push_back(w);
    p.y_star.push_back(y);

    double agent_flow = 0.0;
    double principal_flow = 0.0;

    for (int k = 0; k < n_steps; ++k) {
        const double t = k * dt;
        const double tm = t + 0.5 * dt;
        const auto [u, pi] = policy_at(field, spec, w, y, t);
        const double a = deviation && *deviation ? (*deviation)(t, k) : u;
        const double th = field.theta.value_of(u);

        const double z = rng.next_normal();
        const double dx = spec.revenue_drift(tm, a) * dt + sig * sqrt_dt * z;
        const double ra = spec.agent_pay_utility(pi);
        const double hu = spec.effort_cost(u);

        x += dx;
        w += -(ra - hu) * dt + th * (dx - spec.revenue_drift(tm, u) * dt);
        y += spec.system_rhs(tm, y, u) * dt;

        agent_flow += (ra - spec.effort_cost(a)) * dt;
        principal_flow += (spec.revenue_drift(tm, a) + spec.principal_running_reward(y, pi)) * dt;

        p.u_star.push_back(u);
        p.pi_star.push_back(pi);
        p.xi.push_back(th);
        p.times.push_back((k + 1) * dt);
        p.x.push_back(x);
        p.w_star.push_back(w);
        p.y_star.push_back(y);

        if (w < g.w_min || w > g.w_max)
            throw GridEscape("w* left the grid at step " + std::to_string(k + 1) + " (w=" +
                             format_double(w) + "); widen the w bounds");
        if (y < g.y_min || y > g.y_max)
            throw GridEscape("y* left the grid at step " + std::to_string(k + 1) + " (y=" +
                             format_double(y) + "); widen the y bounds");
    }

    p.end_pay = spec.end_pay_inverse(w);
    r.agent_payoff = agent_flow + spec.end_pay_utility(p.end_pay);
    r.principal_payoff = principal_flow + spec.principal_terminal_reward(y) - p.end_pay;
    return r;
}

ContractPath synthesize_path(const ValueField& field, const ModelSpec& spec, std::uint64_t seed,
                             int n_steps) {
    return simulate_contract(field, spec, seed, n_steps).path;
}

EnsembleSummary ensemble(const ValueField& field, const ModelSpec& spec, int n_paths,
                         std::uint64_t base_seed, int n_steps, const ControlSchedule* deviation) {
    if (n_paths < 2) throw InvalidParams("ensemble: n_paths must be >= 2");
    if (n_steps <= 0) n_steps = field.grid.n_t;

    std::vector<double> agent(static_cast<size_t>(n_paths));
    std::vector<double> principal(static_cast<size_t>(n_paths));
    std::vector<double> end_pay(static_cast<size_t>(n_paths));
    std::exception_ptr first_error;
    std::atomic_flag error_seen = ATOMIC_FLAG_INIT;

    parallel_for(n_paths, [&](int k) {
        try {
            const SimResult r = simulate_contract(field, spec, derive_seed(base_seed, k), n_steps,
                                                  deviation);
            agent[static_cast<size_t>(k)] = r.agent_payoff;
            principal[static_cast<size_t>(k)] = r.principal_payoff;
            end_pay[static_cast<size_t>(k)] = r.path.end_pay;
        } catch (...) {
            if (!error_seen.test_and_set()) first_error = std::current_exception();
        }
    });
    if (first_error) std::rethrow_exception(first_error);

    auto mean_se = [n_paths](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n_paths;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double se = n_paths > 1 ? std::sqrt(ss / (n_paths - 1) / n_paths) : 0.0;
        return std::pair<double, double>{mean, se};
    };

    EnsembleSummary s;
    s.n_paths = n_paths;
    s.n_steps = n_steps;
    s.base_seed = base_seed;
    std::tie(s.agent_mean, s.agent_se) = mean_se(agent);
    std::tie(s.principal_mean, s.principal_se) = mean_se(principal);
    double ep = 0.0;
    for (double x : end_pay) ep += x;
    s.end_pay_mean = ep / n_paths;
    return s;
}

void write_path_csv(const std::string& path, const ContractPath& p) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "t,x,w_star,y_star,u_star,pi_star,xi\n";
    const size_t steps = p.u_star.size();
    for (size_t k = 0; k < p.times.size(); ++k) {
        const size_t s = k < steps ? k : steps - 1;
        out << format_double(p.times[k]) << "," << format_double(p.x[k]) << ","
            << format_double(p.w_star[k]) << "," << format_double(p.y_star[k]) << ","
            << format_double(p.u_star[s]) << "," << format_double(p.pi_star[s]) << ","
            << format_double(p.xi[s]) << "\n";
    }
}

}  // namespace pacs
