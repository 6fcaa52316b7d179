#include "kpz/limit_shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kpz/parabola.hpp"

namespace kpz {

namespace {

bool segment_alive(const ShockSegment& seg, double s) {
    // segments live on [s0, s1); at a merge instant the merged segment
    // is the live one; final segments keep s = t_term
    if (s < seg.s0)
        return false;
    if (s < seg.s1)
        return true;
    return seg.parent < 0 && s == seg.s1;
}

// Live shocks of one block at backward time s, ordered by position.
struct Region {
    std::vector<double> pos;
    std::vector<const ShockSegment*> segs;
};

Region live_shocks(const ShockTree& tree, const Cone& cone, double s) {
    Region r;
    // walk every leaf lineage of the block; distinct live segments only
    for (std::size_t c : cone.block) {
        const int id = tree.lineage_at(c, s);
        const ShockSegment* seg = &tree.segments[id];
        if (!segment_alive(*seg, s))
            throw NumericError("limit_shape: lineage lookup returned a dead segment");
        if (std::find(r.segs.begin(), r.segs.end(), seg) == r.segs.end()) {
            r.segs.push_back(seg);
            r.pos.push_back(seg->position(s));
        }
    }
    // lineages are ordered left to right already; assert anyway
    for (std::size_t i = 1; i < r.pos.size(); ++i)
        if (r.pos[i] < r.pos[i - 1])
            throw NumericError("limit_shape: live shocks out of order");
    return r;
}

// Slope of the region of the block that contains x at backward time s.
double region_slope(const Region& r, double x) {
    if (x <= r.pos.front())
        return r.segs.front()->left_slope;
    for (std::size_t i = 0; i + 1 < r.segs.size(); ++i)
        if (x <= r.pos[i + 1])
            return r.segs[i]->right_slope;
    return r.segs.back()->right_slope;
}

const Cone* cone_containing(const std::vector<Cone>& cones, double t, double x) {
    for (const Cone& cone : cones)
        if (x >= cone.v_left * t && x <= cone.v_right * t)
            return &cone;
    return nullptr;
}

} // namespace

LimitShape build_limit_shape(const ProbeConfig& config) {
    LimitShape shape;
    shape.tree = build_shock_tree(config);
    shape.profile = build_profile(config);
    shape.cones = cones_of(shape.tree);
    return shape;
}

double shape_eval(const LimitShape& shape, double t, double x) {
    const double tt = shape.tree.t_term;
    if (!(t > 0.0) || t > tt)
        throw DomainError("shape_eval: t must lie in (0, " + std::to_string(tt) +
                          "], got t=" + std::to_string(t));
    if (t == tt)
        return profile_eval(shape.profile, x);

    const Cone* cone = cone_containing(shape.cones, t, x);
    if (cone == nullptr)
        return parabola_eval(t, x);

    const double s = tt - t;
    const Region r = live_shocks(shape.tree, *cone, s);
    const double sigma = region_slope(r, x);
    // ride the characteristic to its terminal foot
    const double foot = x - sigma * s;
    return profile_eval(shape.profile, foot) + 0.5 * sigma * sigma * s;
}

Characteristic characteristic_through(const LimitShape& shape, double t, double x) {
    const double tt = shape.tree.t_term;
    if (!(t > 0.0) || t > tt)
        throw DomainError("characteristic_through: t must lie in (0, " +
                          std::to_string(tt) + "], got t=" + std::to_string(t));
    const double xtol = 1e-12 * std::max(1.0, std::fabs(x));

    if (t == tt) {
        for (double kink : shape.profile.kinks)
            if (std::fabs(x - kink) <= xtol)
                throw OnShockError("characteristic_through: (" + std::to_string(t) + ", " +
                                       std::to_string(x) +
                                       ") is a terminal kink; feet " + std::to_string(x) +
                                       " and " + std::to_string(x) + " both apply",
                                   x, x);
        return {x, shape.profile.slope_right(x)};
    }

    const Cone* cone = cone_containing(shape.cones, t, x);
    if (cone == nullptr)
        return {x * tt / t, -x / t}; // background ray out of the origin

    const double s = tt - t;
    const Region r = live_shocks(shape.tree, *cone, s);
    for (std::size_t i = 0; i < r.pos.size(); ++i) {
        if (std::fabs(x - r.pos[i]) <= xtol) {
            const double fl = x - r.segs[i]->left_slope * s;
            const double fr = x - r.segs[i]->right_slope * s;
            throw OnShockError("characteristic_through: (" + std::to_string(t) + ", " +
                                   std::to_string(x) + ") lies on a shock; candidate feet " +
                                   std::to_string(fl) + " and " + std::to_string(fr),
                               fl, fr);
        }
    }
    const double sigma = region_slope(r, x);
    return {x - sigma * s, sigma};
}

double shape_eval_oracle(const TerminalProfile& profile, double t, double x,
                         double grid_step) {
    const double tt = profile.t;
    if (!(t > 0.0) || t > tt)
        throw DomainError("shape_eval_oracle: t must lie in (0, " + std::to_string(tt) +
                          "], got t=" + std::to_string(t));
    if (!(grid_step > 0.0))
        throw DomainError("shape_eval_oracle: grid step must be positive");
    if (t == tt)
        return profile_eval(profile, x); // inf-convolution degenerates to f itself

    const double s = tt - t;
    // bracket every possible minimizer: all tangency feet, the query
    // point, and the background foot x tt / t, padded by 2
    double lo = std::min(x, x * tt / t);
    double hi = std::max(x, x * tt / t);
    for (const Piece& p : profile.pieces) {
        if (std::isfinite(p.a)) {
            lo = std::min(lo, p.a);
            hi = std::max(hi, p.a);
        }
        if (std::isfinite(p.b)) {
            lo = std::min(lo, p.b);
            hi = std::max(hi, p.b);
        }
    }
    lo -= 2.0;
    hi += 2.0;

    const double inv2s = 0.5 / s;
    const double inv2t = 0.5 / tt;
    double best = std::numeric_limits<double>::infinity();
    for (const Piece& p : profile.pieces) {
        const double a = std::max(p.a, lo);
        const double b = std::min(p.b, hi);
        if (a > b)
            continue;
        const long k0 = static_cast<long>(std::ceil((a - lo) / grid_step - 1e-9));
        const long k1 = static_cast<long>(std::floor((b - lo) / grid_step + 1e-9));
        if (k0 > k1)
            continue;
        // the minimand is quadratic on each piece: march it with second
        // differences so the hot loop is three adds and a compare
        const bool linear = p.kind == PieceKind::Linear;
        const double A = linear ? inv2s : inv2s - inv2t;
        const double B = (linear ? p.slope : 0.0) - 2.0 * inv2s * x;
        const double C = (linear ? p.intercept : 0.0) + inv2s * x * x;
        const double y0 = lo + static_cast<double>(k0) * grid_step;
        double q = (A * y0 + B) * y0 + C;
        double d1 = A * grid_step * (2.0 * y0 + grid_step) + B * grid_step;
        const double d2 = 2.0 * A * grid_step * grid_step;
        for (long k = k0; k <= k1; ++k) {
            if (q < best)
                best = q;
            q += d1;
            d1 += d2;
        }
    }
    return best;
}

} // namespace kpz
