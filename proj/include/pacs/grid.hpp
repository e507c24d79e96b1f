#pragma once

#include <vector>

#include "pacs/model.hpp"

namespace pacs {

/// Rectangular (w, y, t) discretization. Node layouts are uniform; dt = T/n_t.
struct Grid {
    double w_min = 0.0, w_max = 1.0;
    int n_w = 3;
    double y_min = 0.0, y_max = 1.0;
    int n_y = 3;
    int n_t = 1;
    double t_max = 1.0;

    double dw() const { return (w_max - w_min) / (n_w - 1); }
    double dy() const { return (y_max - y_min) / (n_y - 1); }
    double dt() const { return t_max / n_t; }
    double w(int i) const { return w_min + i * dw(); }
    double y(int j) const { return y_min + j * dy(); }
    double t(int n) const { return n * dt(); }

    bool same_shape(const Grid& other) const;
};

/// Largest |f| and |r^A - h| over the grid's ranges; used for CFL checks.
struct CoefficientBounds {
    double max_abs_f = 0.0;
    double max_abs_w_drift = 0.0;
};
CoefficientBounds coefficient_bounds(const ModelSpec& spec, const Grid& grid);

/// Forward envelope of reachable y from y0 under extreme controls.
struct Envelope {
    double lo = 0.0;
    double hi = 0.0;
};
Envelope y_envelope(const ModelSpec& spec);

/// Validates every grid invariant against the model: b interior in w, the
/// reachable y envelope contained, the diffusion CFL bound
/// dt <= 0.5 dw^2/(sigma theta_max)^2 and both advection bounds. Throws
/// InvalidParams or CflViolation.
void check_grid(const ModelSpec& spec, const ThetaTable& table, const Grid& grid);

/// Grid with the default bounds rule: w in b -+ (3 theta_max sigma sqrt(T) + R_T)
/// with R_T = T max|r^A - h|, y from the forward envelope with padding, and
/// n_t from the tightest stability bound when 0 is passed.
Grid auto_grid(const ModelSpec& spec, const ThetaTable& table, int n_w, int n_y, int n_t = 0,
               double cfl_fraction = 0.4);

/// Dyadic refinements of `base` (each halves dw and dy; n_t rescaled to keep
/// the same stability margins), ordered coarse to fine, ending at the finest.
std::vector<Grid> dyadic_refinements(const ModelSpec& spec, const ThetaTable& table, const Grid& base,
                                     int levels);

}  // namespace pacs
