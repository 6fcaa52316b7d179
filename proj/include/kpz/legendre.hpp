#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kpz/probe.hpp"

namespace kpz {

// A Legendre-dual pair: the argmax heights of sup_h (m.h - I(h))
// together with the moment Lyapunov exponent value.
struct DualPair {
    ProbeConfig config;          // dual heights at the probe positions
    std::vector<double> masses;
    double lyapunov = 0.0;
};

// Heights solving grad I(h) = m over the concave extension.  Solved by
// damped Newton on the convex potential I(h) - m.h with a
// finite-difference Jacobian, seeded from the decoupled one-point law
// h_c = m_c^2 t / 8 + p(t, x_c), and polished onto the envelope.
// Throws DomainError on negative masses, NumericError on
// non-convergence (residual tolerance 1e-10, 200 iterations).
std::vector<double> dual_height(double t, const std::vector<double>& xs,
                                const std::vector<double>& masses);

// Moment Lyapunov exponent via duality: L = m.h* - I(h*) at the dual
// heights h*.
DualPair lyapunov_from_duality(double t, const std::vector<double>& xs,
                               const std::vector<double>& masses);

// One intermediate-time cluster of the shock tree: probes of Branch(a)
// merged at position x' with height psi(t_mid, x') and mass sum m'.
struct SplitCluster {
    double position = 0.0;
    double height = 0.0;
    double mass = 0.0;
    std::vector<std::size_t> branch; // probe indices
};

struct TreeCheckResult {
    double t_mid = 0.0;
    double lhs = 0.0; // L(0 -> (xs, m)) over the full horizon
    double rhs = 0.0; // trunk term + one branch term per cluster
    std::vector<SplitCluster> clusters;
    double intermediate_residual = 0.0; // |grad I(mid config) - m'|_inf
};

// Splits the duality identity at t_mid in (0, t): the Lyapunov
// exponent of the full horizon equals the trunk exponent up to t_mid
// plus one branch exponent per intermediate cluster, with shifted
// spatial origins.  config must lie in H_conc.
TreeCheckResult tree_decomposition_check(const ProbeConfig& config, double t_mid);

// Two-probe symmetry-breaking scan at positions -1, 1, horizon 1:
// splits total mass m as (m_minus, m - m_minus) over a uniform grid
// and records the Lyapunov exponent of each split.  Every point is
// cross-checked against the corridor functional of its own shock tree
// (tolerance 1e-8; NumericError on disagreement).
struct ScanPoint {
    double m_minus = 0.0;
    double L = 0.0;
};

std::vector<ScanPoint> symmetry_breaking_scan(double m, std::size_t grid_points);

std::string tree_check_to_json(const TreeCheckResult& result);
std::string dual_pair_to_json(const DualPair& pair);

} // namespace kpz
