#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pacs/grid.hpp"
#include "pacs/model.hpp"

namespace pacs {

/// Solved value function and joint feedback policy on a grid.
///
/// phi holds n_t+1 time slices (slice n_t is the terminal condition
/// -g^{-1}(w) + q(y)); policy_u / policy_pi hold n_t step slices, entry n
/// being the argmax used when stepping from slice n+1 down to n.
struct ValueField {
    Grid grid;
    ThetaTable theta;
    std::vector<double> phi;
    std::vector<double> policy_u;
    std::vector<double> policy_pi;

    std::size_t idx(int n, int i, int j) const {
        return (static_cast<std::size_t>(n) * grid.n_w + i) * grid.n_y + j;
    }
    double phi_at(int n, int i, int j) const { return phi[idx(n, i, j)]; }
    double u_at(int n, int i, int j) const { return policy_u[idx(n, i, j)]; }
    double pi_at(int n, int i, int j) const { return policy_pi[idx(n, i, j)]; }

    /// Bilinear interpolation of phi at time slice n.
    double interp_phi(int n, double w, double y) const;
};

/// Explicit monotone backward sweep: first-order upwind advection in w and y,
/// central second difference in w, exhaustive Hamiltonian maximization per
/// node. Boundary rows use one-sided first derivatives and zero curvature.
/// Throws CflViolation up front and NonFiniteValue (with the step index) if
/// the sweep diverges.
ValueField solve(const ModelSpec& spec, const Grid& grid);

/// Same sweep without storing history; returns phi(b, y0, 0) only.
double solve_value_at_start(const ModelSpec& spec, const Grid& grid);

/// Feedback policy at an off-grid point: reconstructs the nodal upwind
/// derivative stencil by bilinear interpolation at the enclosing time step
/// and re-runs the Hamiltonian argmax (controls are never interpolated). At a
/// grid node this reproduces the stored policy exactly. Throws OutOfBounds.
std::pair<double, double> policy_at(const ValueField& field, const ModelSpec& spec, double w, double y,
                                    double t);

struct ConvergenceReport {
    struct Row {
        Grid grid;
        double value = 0.0;  // phi(b, y0, 0)
    };
    std::vector<Row> rows;
    std::vector<double> gaps;  // |value_k - value_{k-1}|
    bool gaps_decreasing = true;

    double final_gap() const { return gaps.empty() ? 0.0 : gaps.back(); }
};

/// Value at the contract's initial state per grid, coarse to fine.
ConvergenceReport convergence_report(const ModelSpec& spec, const std::vector<Grid>& grids);

}  // namespace pacs
