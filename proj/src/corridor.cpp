#include "kpz/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace kpz {

double AtomTrajectory::position(double s) const {
    if (s_knots.size() < 2 || s_knots.size() != x_knots.size())
        throw DomainError("AtomTrajectory: needs matching knot arrays (>= 2 knots)");
    if (s < s_knots.front() - 1e-12 || s > s_knots.back() + 1e-12)
        throw DomainError("AtomTrajectory: s=" + std::to_string(s) +
                          " outside trajectory domain");
    const auto it = std::upper_bound(s_knots.begin(), s_knots.end(), s);
    std::size_t i = it == s_knots.begin() ? 0 : (it - s_knots.begin()) - 1;
    if (i + 1 >= s_knots.size())
        i = s_knots.size() - 2;
    const double w = (s - s_knots[i]) / (s_knots[i + 1] - s_knots[i]);
    return x_knots[i] + w * (x_knots[i + 1] - x_knots[i]);
}

double AtomTrajectory::velocity_at(double s) const {
    const auto it = std::upper_bound(s_knots.begin(), s_knots.end(), s);
    std::size_t i = it == s_knots.begin() ? 0 : (it - s_knots.begin()) - 1;
    if (i + 1 >= s_knots.size())
        i = s_knots.size() - 2;
    return (x_knots[i + 1] - x_knots[i]) / (s_knots[i + 1] - s_knots[i]);
}

CorridorEnsemble ensemble_from_tree(const ShockTree& tree,
                                    const std::vector<double>& masses) {
    if (masses.size() != tree.leaf_segment.size())
        throw DomainError("ensemble_from_tree: expected " +
                          std::to_string(tree.leaf_segment.size()) + " masses, got " +
                          std::to_string(masses.size()));
    CorridorEnsemble ens;
    ens.domain_end = tree.t_term;
    for (std::size_t c = 0; c < masses.size(); ++c) {
        AtomTrajectory atom;
        atom.mass = masses[c];
        int id = tree.leaf_segment[c];
        atom.s_knots.push_back(tree.segments[id].s0);
        atom.x_knots.push_back(tree.segments[id].x0);
        while (true) {
            const ShockSegment& seg = tree.segments[id];
            atom.s_knots.push_back(seg.s1);
            atom.x_knots.push_back(seg.position(seg.s1));
            if (seg.parent < 0)
                break;
            id = seg.parent;
        }
        ens.atoms.push_back(std::move(atom));
    }
    return ens;
}

double evaluate_M(const CorridorEnsemble& ensemble, double s_from, double s_to) {
    if (!(s_from >= 0.0) || !(s_to <= ensemble.domain_end) || s_from > s_to)
        throw DomainError("evaluate_M: need 0 <= s_from <= s_to <= domain_end");
    if (ensemble.atoms.empty() || s_from == s_to)
        return 0.0;

    // event times: all knots falling inside the window
    std::vector<double> cuts = {s_from, s_to};
    for (const auto& atom : ensemble.atoms)
        for (double s : atom.s_knots)
            if (s > s_from + 1e-12 && s < s_to - 1e-12)
                cuts.push_back(s);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::fabs(a - b) <= 1e-12; }),
               cuts.end());

    const std::size_t na = ensemble.atoms.size();
    std::vector<std::size_t> order(na);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double u = cuts[k];
        const double v = cuts[k + 1];
        const double mid = 0.5 * (u + v);
        std::vector<double> pos(na), vel(na);
        for (std::size_t i = 0; i < na; ++i) {
            pos[i] = ensemble.atoms[i].position(mid);
            vel[i] = ensemble.atoms[i].velocity_at(mid);
        }
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return pos[a] < pos[b]; });

        // maximal co-moving clusters; coinciding atoms must co-move
        double cube_sum = 0.0;
        std::size_t i = 0;
        while (i < na) {
            std::size_t j = i;
            double cluster_mass = ensemble.atoms[order[i]].mass;
            while (j + 1 < na) {
                const double ptol =
                    1e-9 * std::max(1.0, std::fabs(pos[order[j]]));
                if (std::fabs(pos[order[j + 1]] - pos[order[j]]) > ptol)
                    break;
                if (std::fabs(vel[order[j + 1]] - vel[order[j]]) >
                    1e-9 * std::max(1.0, std::fabs(vel[order[j]])))
                    throw MalformedEnsembleError(
                        "evaluate_M: atoms overlap at s=" + std::to_string(mid) +
                        ", x=" + std::to_string(pos[order[j]]) +
                        " with distinct velocities");
                ++j;
                cluster_mass += ensemble.atoms[order[j]].mass;
            }
            cube_sum += cluster_mass * cluster_mass * cluster_mass;
            i = j + 1;
        }
        double kinetic = 0.0;
        for (std::size_t a = 0; a < na; ++a)
            kinetic += 0.5 * ensemble.atoms[a].mass * vel[a] * vel[a];
        total += (v - u) * (cube_sum / 24.0 - kinetic);
    }
    return total;
}

} // namespace kpz
