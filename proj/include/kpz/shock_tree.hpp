#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kpz/probe.hpp"
#include "kpz/profile.hpp"

namespace kpz {

// One straight stretch of a shock in backward time s = t_term - t.
// The segment lives on [s0, s1] and moves affinely:
//   position(s) = x0 + v (s - s0).
// left_slope/right_slope are the terminal-profile slopes carried on the
// two sides of the shock; the Rankine-Hugoniot speed in backward time
// is their average.
struct ShockSegment {
    double s0 = 0.0;
    double s1 = 0.0;
    double x0 = 0.0;
    double v = 0.0;
    double left_slope = 0.0;
    double right_slope = 0.0;
    double mass = 0.0; // filled by corridor_masses
    int parent = -1;   // segment this one merges into, -1 at the top
    int leaf_probe = -1; // probe index for leaf segments, -1 otherwise
    std::vector<int> children;

    double position(double s) const { return x0 + v * (s - s0); }
};

struct MergeEvent {
    double s = 0.0;
    int merged = -1;           // the segment created by the merge
    std::vector<int> absorbed; // the segments that ended here
};

// Backward-in-time shock forest of a concave terminal configuration.
// One leaf per probe; shocks only merge (never branch) and every
// lineage reaches the root (s = t_term, x = 0).  Segments are alive on
// [s0, s1); at a merge time the merged segment is the live one.
struct ShockTree {
    double t_term = 1.0;
    ProbeConfig config;
    std::vector<ShockSegment> segments;
    std::vector<MergeEvent> events;
    std::vector<int> leaf_segment;                  // probe index -> leaf segment id
    std::vector<std::vector<std::size_t>> blocks;   // probe indices per merge cluster
    std::vector<int> block_root;                    // final segment id per block

    // Live segment of probe c's lineage at backward time s.
    int lineage_at(std::size_t probe, double s) const;
};

// Spacetime cone of one merge block: in forward time t the block's
// excursion region is { (t,x) : v_left * t <= x <= v_right * t }.
struct Cone {
    double v_left = 0.0;
    double v_right = 0.0;
    std::vector<std::size_t> block; // probe indices
};

// Builds the shock tree.  Requires the configuration to lie in H_conc
// (throws DomainError otherwise).
ShockTree build_shock_tree(const ProbeConfig& config);

// Returns a copy of the tree with per-segment masses: the sum of the
// leaf masses flowing through each segment.  masses has one entry per
// probe.
ShockTree corridor_masses(const ShockTree& tree, const std::vector<double>& masses);

// One cone per block, ordered left to right.  Cones of distinct blocks
// are disjoint (they can touch only at the root).
std::vector<Cone> cones_of(const ShockTree& tree);

// JSON export: segments (s0,s1,a,v,mass with position(s) = a + v s),
// merge events, and cones.
std::string shock_tree_to_json(const ShockTree& tree);

} // namespace kpz
