#pragma once

#include <vector>

#include "kpz/probe.hpp"
#include "kpz/profile.hpp"
#include "kpz/shock_tree.hpp"

namespace kpz {

// Spacetime limit shape psi(t,x) on (0, t_term] x R realized by the
// terminal profile: the backward (non-entropic forward) Burgers
// evolution of the envelope.  Outside all cones psi equals the
// background parabola; inside a cone it is piecewise linear between
// the live shocks of that block.
struct LimitShape {
    TerminalProfile profile;
    ShockTree tree;
    std::vector<Cone> cones;
};

LimitShape build_limit_shape(const ProbeConfig& config);

// psi(t,x).  t must lie in (0, t_term].
double shape_eval(const LimitShape& shape, double t, double x);

// Characteristic line through (t,x): the terminal foot y and the
// constant slope of psi along the line.  Throws OnShockError when
// (t,x) sits on a shock (two candidate feet).
struct Characteristic {
    double foot = 0.0;  // terminal position y
    double slope = 0.0; // spatial slope of psi carried by the line
};

Characteristic characteristic_through(const LimitShape& shape, double t, double x);

// Independent brute-force evaluation via the inf-convolution
//   psi(t,x) = min_y [ f(y) + (y-x)^2 / (2 (t_term - t)) ],
// scanned over a y-grid of the given step.  The grid spans all
// tangency feet of the profile, the query point, and the parabola foot
// x * t_term / t, padded by 2 on both sides, so the scan brackets the
// true minimizer for every query.  At t = t_term returns f(x).
double shape_eval_oracle(const TerminalProfile& profile, double t, double x,
                         double grid_step);

} // namespace kpz
