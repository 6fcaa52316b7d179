#pragma once

// Independent oracles for the test suite: a grid-hull envelope builder,
// finite-difference gradients, and seeded configuration generators.
// Everything here is deliberately reimplemented from first principles
// so agreement with the library is meaningful.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kpz/legendre.hpp"
#include "kpz/parabola.hpp"
#include "kpz/probe.hpp"
#include "kpz/profile.hpp"
#include "kpz/rate.hpp"

namespace oracles {

// Least concave majorant of the parabola background and the probe
// points, computed on a dense grid by an upper-hull sweep.  The hull is
// a chordal underestimate of the true envelope with error bounded by
// step^2 / (8 t) on parabolic stretches and zero on linear ones.
struct GridEnvelope {
    std::vector<double> xs, ys; // hull vertices, xs strictly increasing

    double eval(double x) const {
        if (x < xs.front() || x > xs.back())
            throw std::out_of_range("GridEnvelope::eval outside hull span");
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = it == xs.end() ? xs.size() - 1 : static_cast<std::size_t>(it - xs.begin());
        const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return ys[i - 1] + w * (ys[i] - ys[i - 1]);
    }
};

inline GridEnvelope grid_envelope(const kpz::ProbeConfig& c, double step = 1e-3,
                                  double pad = 2.0) {
    double reach = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double rad = c.xs[i] * c.xs[i] + 2.0 * c.t * std::fabs(c.hs[i]);
        reach = std::max(reach, std::fabs(c.xs[i]) + std::sqrt(std::max(rad, 0.0)));
    }
    const double lo = -reach - pad, hi = reach + pad;

    std::vector<std::pair<double, double>> pts;
    const long n = std::lround(std::ceil((hi - lo) / step));
    pts.reserve(static_cast<std::size_t>(n) + c.size() + 1);
    for (long k = 0; k <= n; ++k) {
        const double x = lo + static_cast<double>(k) * step;
        pts.emplace_back(x, kpz::parabola_eval(c.t, x));
    }
    for (std::size_t i = 0; i < c.size(); ++i)
        pts.emplace_back(c.xs[i],
                         std::max(c.hs[i], kpz::parabola_eval(c.t, c.xs[i])));
    std::sort(pts.begin(), pts.end());
    // exact x ties: keep only the higher point
    std::vector<std::pair<double, double>> uniq;
    for (const auto& p : pts) {
        if (!uniq.empty() && uniq.back().first == p.first)
            uniq.back().second = std::max(uniq.back().second, p.second);
        else
            uniq.push_back(p);
    }

    GridEnvelope env;
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : uniq) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            const double cross = (b.first - a.first) * (p.second - a.second) -
                                 (b.second - a.second) * (p.first - a.first);
            if (cross >= 0.0) // middle point on or below the chord: drop it
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    for (const auto& p : hull) {
        env.xs.push_back(p.first);
        env.ys.push_back(p.second);
    }
    return env;
}

// Central finite-difference gradient of the rate functional in the
// probe heights.  Valid only at configurations where every height sits
// strictly above the parabola by more than the step.
inline std::vector<double> fd_rate_gradient(const kpz::ProbeConfig& c,
                                            double step = 1e-5) {
    std::vector<double> g(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double h = step * std::max(1.0, std::fabs(c.hs[i]));
        kpz::ProbeConfig cp = c, cm = c;
        cp.hs[i] += h;
        cm.hs[i] -= h;
        g[i] = (kpz::rate(cp).value - kpz::rate(cm).value) / (2.0 * h);
    }
    return g;
}

// Deterministic configuration factory.
struct ConfigGen {
    std::mt19937_64 rng;

    explicit ConfigGen(std::uint64_t seed) : rng(seed) {}

    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    }

    std::vector<double> sorted_xs(std::size_t n, double lo = -3.0, double hi = 3.0,
                                  double min_gap = 0.2) {
        std::vector<double> xs;
        for (int attempt = 0; attempt < 10000 && xs.size() < n; ++attempt) {
            const double x = uniform(lo, hi);
            bool ok = true;
            for (double y : xs)
                ok = ok && std::fabs(x - y) >= min_gap;
            if (ok)
                xs.push_back(x);
        }
        if (xs.size() < n)
            throw std::runtime_error("sorted_xs: could not place probes");
        std::sort(xs.begin(), xs.end());
        return xs;
    }

    std::vector<double> masses(std::size_t n, double lo = 0.3, double hi = 2.5) {
        std::vector<double> m(n);
        for (double& v : m)
            v = uniform(lo, hi);
        return m;
    }

    // heights lifted above the parabola; lands anywhere in H
    kpz::ProbeConfig admissible(double t, std::size_t n, double lift_max = 2.0) {
        kpz::ProbeConfig c;
        c.t = t;
        c.xs = sorted_xs(n);
        c.hs.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            c.hs[i] = kpz::parabola_eval(t, c.xs[i]) + uniform(0.05, lift_max);
        return c;
    }

    // dual heights of strictly positive masses: every probe carries a
    // strict kink, so the configuration lies in the interior of H_conc
    kpz::ProbeConfig interior(double t, std::size_t n) {
        const std::vector<double> xs = sorted_xs(n);
        const std::vector<double> m = masses(n, 0.4, 2.2);
        return kpz::ProbeConfig{t, xs, kpz::dual_height(t, xs, m)};
    }
};

} // namespace oracles
