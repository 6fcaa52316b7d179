#pragma once

#include <cstddef>
#include <vector>

#include "kpz/shock_tree.hpp"

namespace kpz {

// Piecewise-affine trajectory of one mass atom in backward time
// s in [0, domain_end]: knot positions x_knots at s_knots, linear in
// between.  Atoms may ride together (coincide with equal velocities);
// coinciding with distinct velocities away from a knot is malformed.
struct AtomTrajectory {
    double mass = 0.0;
    std::vector<double> s_knots; // strictly increasing, >= 2 entries
    std::vector<double> x_knots;

    double position(double s) const;
    double velocity_at(double s) const; // velocity of the span containing s
};

struct CorridorEnsemble {
    double domain_end = 1.0;
    std::vector<AtomTrajectory> atoms;
};

// Atomic ensemble carried by a shock tree: one atom per probe, riding
// its lineage from the leaf down to the root, weighted by masses[c].
CorridorEnsemble ensemble_from_tree(const ShockTree& tree,
                                    const std::vector<double>& masses);

// The corridor functional on [s_from, s_to]:
//   M = sum over maximal co-moving clusters of
//       integral ( (cluster mass)^3 / 24  -  (1/2) sum_atoms m v^2 ) ds.
// Clusters are detected on each subinterval between knot times; atoms
// overlapping with distinct velocities raise MalformedEnsembleError.
double evaluate_M(const CorridorEnsemble& ensemble, double s_from, double s_to);

} // namespace kpz
