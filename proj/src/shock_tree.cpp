#include "kpz/shock_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace kpz {

namespace {
constexpr double kEventTol = 1e-12; // collision-time tie tolerance
}

int ShockTree::lineage_at(std::size_t probe, double s) const {
    if (probe >= leaf_segment.size())
        throw DomainError("ShockTree::lineage_at: probe index out of range");
    if (s < 0.0 || s > t_term)
        throw DomainError("ShockTree::lineage_at: s outside [0, t_term]");
    int id = leaf_segment[probe];
    while (segments[id].parent >= 0 && s >= segments[id].s1)
        id = segments[id].parent;
    return id;
}

ShockTree build_shock_tree(const ProbeConfig& config) {
    config.validate();
    if (!in_H_conc(config))
        throw DomainError("build_shock_tree: configuration must lie in H_conc "
                          "(all heights on the concave envelope, none below the parabola)");

    ShockTree tree;
    tree.t_term = config.t;
    tree.config = config;
    const TerminalProfile profile = build_profile(config);

    const std::size_t n = config.size();
    tree.leaf_segment.resize(n);
    std::vector<int> active; // live segment ids, left to right
    for (std::size_t c = 0; c < n; ++c) {
        ShockSegment seg;
        seg.s0 = 0.0;
        seg.s1 = tree.t_term;
        seg.x0 = config.xs[c];
        seg.left_slope = profile.slope_left(config.xs[c]);
        seg.right_slope = profile.slope_right(config.xs[c]);
        seg.v = 0.5 * (seg.left_slope + seg.right_slope);
        seg.leaf_probe = static_cast<int>(c);
        tree.leaf_segment[c] = static_cast<int>(tree.segments.size());
        active.push_back(static_cast<int>(tree.segments.size()));
        tree.segments.push_back(seg);
    }

    // front tracking: repeatedly take the earliest adjacent collision,
    // fuse the participants (ties chain into multi-way merges), repeat.
    // Collisions within tolerance of the terminal time are the common
    // root arrival, not merges.
    double s_now = 0.0;
    while (active.size() > 1) {
        double s_min = std::numeric_limits<double>::infinity();
        std::vector<double> hit(active.size() - 1,
                                std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i + 1 < active.size(); ++i) {
            const ShockSegment& a = tree.segments[active[i]];
            const ShockSegment& b = tree.segments[active[i + 1]];
            if (a.v <= b.v)
                continue; // separating or parallel, never meet
            const double s_c =
                ((b.x0 - b.v * b.s0) - (a.x0 - a.v * a.s0)) / (a.v - b.v);
            if (s_c >= s_now - kEventTol) {
                hit[i] = s_c;
                s_min = std::min(s_min, s_c);
            }
        }
        if (s_min >= tree.t_term - kEventTol)
            break; // remaining shocks run straight into the root

        std::vector<int> next_active;
        for (std::size_t i = 0; i < active.size();) {
            if (i + 1 >= active.size() || hit[i] > s_min + kEventTol) {
                next_active.push_back(active[i]);
                ++i;
                continue;
            }
            std::size_t j = i; // run [i, j] collides pairwise at s_min
            while (j + 1 < active.size() && hit[j] <= s_min + kEventTol)
                ++j;
            ShockSegment merged;
            merged.s0 = s_min;
            merged.s1 = tree.t_term;
            merged.x0 = 0.5 * (tree.segments[active[i]].position(s_min) +
                               tree.segments[active[j]].position(s_min));
            merged.left_slope = tree.segments[active[i]].left_slope;
            merged.right_slope = tree.segments[active[j]].right_slope;
            merged.v = 0.5 * (merged.left_slope + merged.right_slope);
            const int merged_id = static_cast<int>(tree.segments.size());
            MergeEvent ev;
            ev.s = s_min;
            ev.merged = merged_id;
            for (std::size_t q = i; q <= j; ++q) {
                tree.segments[active[q]].s1 = s_min;
                tree.segments[active[q]].parent = merged_id;
                merged.children.push_back(active[q]);
                ev.absorbed.push_back(active[q]);
            }
            tree.segments.push_back(merged);
            tree.events.push_back(ev);
            next_active.push_back(merged_id);
            i = j + 1;
        }
        active.swap(next_active);
        s_now = s_min;
    }

    // group leaves into blocks by their final segment and check the
    // root property: every lineage ends at x = 0
    tree.blocks.clear();
    tree.block_root.clear();
    int last_root = -1;
    for (std::size_t c = 0; c < n; ++c) {
        int id = tree.leaf_segment[c];
        while (tree.segments[id].parent >= 0)
            id = tree.segments[id].parent;
        if (id != last_root) {
            tree.blocks.emplace_back();
            tree.block_root.push_back(id);
            last_root = id;
        }
        tree.blocks.back().push_back(c);
        const double at_root = tree.segments[id].position(tree.t_term);
        const double scale = std::max(1.0, std::fabs(config.xs[c]));
        if (std::fabs(at_root) > 1e-8 * scale)
            throw NumericError("build_shock_tree: lineage of probe " + std::to_string(c) +
                               " misses the root by " + std::to_string(at_root));
    }
    return tree;
}

ShockTree corridor_masses(const ShockTree& tree, const std::vector<double>& masses) {
    if (masses.size() != tree.leaf_segment.size())
        throw DomainError("corridor_masses: expected " +
                          std::to_string(tree.leaf_segment.size()) + " masses, got " +
                          std::to_string(masses.size()));
    for (double m : masses)
        if (!std::isfinite(m) || m < 0.0)
            throw DomainError("corridor_masses: masses must be finite and nonnegative");
    ShockTree out = tree;
    for (auto& seg : out.segments)
        seg.mass = 0.0;
    for (std::size_t c = 0; c < masses.size(); ++c) {
        int id = out.leaf_segment[c];
        out.segments[id].mass += masses[c];
        while (out.segments[id].parent >= 0) {
            id = out.segments[id].parent;
            out.segments[id].mass += masses[c];
        }
    }
    return out;
}

std::vector<Cone> cones_of(const ShockTree& tree) {
    std::vector<Cone> cones;
    for (std::size_t b = 0; b < tree.blocks.size(); ++b) {
        const ShockSegment& root = tree.segments[tree.block_root[b]];
        Cone cone;
        // the cone edges are the spacetime rays swept by the outermost
        // tangency feet: x = -sigma t for the extreme support slopes
        cone.v_left = -root.left_slope;
        cone.v_right = -root.right_slope;
        cone.block = tree.blocks[b];
        if (cone.v_left > cone.v_right + 1e-12)
            throw NumericError("cones_of: inverted cone on block " + std::to_string(b));
        if (!cones.empty() && cones.back().v_right > cone.v_left + 1e-9)
            throw NumericError("cones_of: overlapping cones between blocks " +
                               std::to_string(b - 1) + " and " + std::to_string(b));
        cones.push_back(cone);
    }
    return cones;
}

std::string shock_tree_to_json(const ShockTree& tree) {
    nlohmann::json doc;
    doc["t_term"] = tree.t_term;
    doc["config"] = {{"t", tree.config.t}, {"xs", tree.config.xs}, {"hs", tree.config.hs}};
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& seg : tree.segments) {
        segs.push_back({{"s0", seg.s0},
                        {"s1", seg.s1},
                        {"a", seg.x0 - seg.v * seg.s0}, // position(s) = a + v s
                        {"v", seg.v},
                        {"mass", seg.mass}});
    }
    doc["segments"] = segs;
    nlohmann::json events = nlohmann::json::array();
    for (const auto& ev : tree.events)
        events.push_back({{"s", ev.s}, {"merged", ev.merged}, {"absorbed", ev.absorbed}});
    doc["events"] = events;
    nlohmann::json cones = nlohmann::json::array();
    for (const auto& cone : cones_of(tree))
        cones.push_back(
            {{"v_left", cone.v_left}, {"v_right", cone.v_right}, {"block", cone.block}});
    doc["cones"] = cones;
    return doc.dump(2);
}

} // namespace kpz
