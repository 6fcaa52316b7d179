#include "kpz/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "kpz/corridor.hpp"
#include "kpz/limit_shape.hpp"
#include "kpz/parabola.hpp"
#include "kpz/rate.hpp"
#include "kpz/shock_tree.hpp"

namespace kpz {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr int kMaxNewton = 200;

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::fabs(x));
    return m;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// Solve A x = b in place by Gaussian elimination with partial
// pivoting; returns false on a vanishing pivot.
bool solve_dense(std::vector<std::vector<double>> A, std::vector<double> b,
                 std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col]))
                piv = r;
        if (std::fabs(A[piv][col]) < 1e-300)
            return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            if (f == 0.0)
                continue;
            for (std::size_t cc = col; cc < n; ++cc)
                A[r][cc] -= f * A[col][cc];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t cc = r + 1; cc < n; ++cc)
            acc -= A[r][cc] * x[cc];
        x[r] = acc / A[r][r];
        if (!std::isfinite(x[r]))
            return false;
    }
    return true;
}

struct Objective {
    double t;
    const std::vector<double>& xs;
    const std::vector<double>& masses;

    ProbeConfig config(const std::vector<double>& h) const {
        return ProbeConfig{t, xs, h};
    }
    // Phi(h) = I(h) - m.h, convex on the envelope extension
    double phi(const std::vector<double>& h) const {
        double v = rate(config(h)).value;
        for (std::size_t c = 0; c < h.size(); ++c)
            v -= masses[c] * h[c];
        return v;
    }
    // grad Phi = kink angles - masses
    std::vector<double> grad(const std::vector<double>& h) const {
        std::vector<double> g = rate(config(h)).gradient;
        for (std::size_t c = 0; c < g.size(); ++c)
            g[c] -= masses[c];
        return g;
    }
};

// Exact 1D convex line minimization of Phi along coordinate c by
// bracket expansion plus golden-section; the fallback when a Newton
// step cannot make progress near a structure change.
void coordinate_minimize(const Objective& f, std::vector<double>& h, std::size_t c) {
    const double golden = 0.6180339887498949;
    double lo = h[c] - 1.0, hi = h[c] + 1.0;
    auto eval = [&](double y) {
        std::vector<double> hh = h;
        hh[c] = y;
        return f.phi(hh);
    };
    double flo = eval(lo), fmid = eval(h[c]), fhi = eval(hi);
    for (int grow = 0; grow < 80 && (flo < fmid || fhi < fmid); ++grow) {
        if (flo < fmid) {
            hi = h[c];
            fhi = fmid;
            h[c] = lo;
            fmid = flo;
            lo -= (hi - lo);
            flo = eval(lo);
        } else {
            lo = h[c];
            flo = fmid;
            h[c] = hi;
            fmid = fhi;
            hi += (hi - lo);
            fhi = eval(hi);
        }
    }
    double a = lo, b = hi;
    double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 120 && (b - a) > 1e-13 * std::max(1.0, std::fabs(a)); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = eval(x2);
        }
    }
    h[c] = 0.5 * (a + b);
}

} // namespace

std::vector<double> dual_height(double t, const std::vector<double>& xs,
                                const std::vector<double>& masses) {
    if (xs.size() != masses.size())
        throw DomainError("dual_height: xs and masses sizes differ");
    for (double m : masses)
        if (!std::isfinite(m) || m < 0.0)
            throw DomainError("dual_height: masses must be finite and nonnegative");
    const std::size_t n = xs.size();

    Objective f{t, xs, masses};
    // decoupled one-point seed: exact whenever the blocks stay separate
    std::vector<double> h(n);
    for (std::size_t c = 0; c < n; ++c)
        h[c] = masses[c] * masses[c] * t / 8.0 + parabola_eval(t, xs[c]);
    f.config(h).validate();

    std::vector<double> g = f.grad(h);
    double gnorm = inf_norm(g);
    double lambda = 0.0;
    int iter = 0;
    for (; iter < kMaxNewton && gnorm > 0.1 * kResidualTol; ++iter) {
        // finite-difference Jacobian of the gradient, symmetrized
        std::vector<std::vector<double>> J(n, std::vector<double>(n, 0.0));
        for (std::size_t c = 0; c < n; ++c) {
            const double step = 1e-6 * std::max(1.0, std::fabs(h[c]));
            std::vector<double> hp = h, hm = h;
            hp[c] += step;
            hm[c] -= step;
            const std::vector<double> gp = f.grad(hp);
            const std::vector<double> gm = f.grad(hm);
            for (std::size_t r = 0; r < n; ++r)
                J[r][c] = (gp[r] - gm[r]) / (2.0 * step);
        }
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r + 1; c < n; ++c) {
                const double sym = 0.5 * (J[r][c] + J[c][r]);
                J[r][c] = J[c][r] = sym;
            }

        // damped Newton step; accept on residual decrease (drives the
        // quadratic tail well below the rounding floor of Phi) or on a
        // genuine Phi decrease far from the solution
        const double phi0 = f.phi(h);
        bool stepped = false;
        double lam = lambda;
        for (int tries = 0; tries < 14 && !stepped; ++tries) {
            auto Jl = J;
            for (std::size_t r = 0; r < n; ++r)
                Jl[r][r] += lam;
            std::vector<double> rhs(n), delta;
            for (std::size_t r = 0; r < n; ++r)
                rhs[r] = -g[r];
            if (!solve_dense(Jl, rhs, delta)) {
                lam = std::max(lam * 10.0, 1e-10);
                continue;
            }
            double slope = 0.0; // directional derivative g . delta
            for (std::size_t r = 0; r < n; ++r)
                slope += g[r] * delta[r];
            for (double alpha = 1.0; alpha > 1e-4; alpha *= 0.5) {
                std::vector<double> ht = h;
                for (std::size_t r = 0; r < n; ++r)
                    ht[r] += alpha * delta[r];
                const std::vector<double> gt = f.grad(ht);
                const double gtn = inf_norm(gt);
                const bool residual_ok = gtn <= gnorm * (1.0 - 1e-4 * alpha);
                const bool phi_ok =
                    slope < 0.0 && f.phi(ht) <= phi0 + 1e-4 * alpha * slope;
                if (residual_ok || phi_ok) {
                    h = std::move(ht);
                    g = gt;
                    gnorm = gtn;
                    stepped = true;
                    lambda = lam * 0.25;
                    break;
                }
            }
            if (!stepped)
                lam = std::max(lam * 10.0, 1e-10);
        }
        if (!stepped) {
            // Newton stalled across a structure change: polish each
            // coordinate by exact 1D convex minimization and restart
            for (std::size_t c = 0; c < n; ++c)
                coordinate_minimize(f, h, c);
            g = f.grad(h);
            gnorm = inf_norm(g);
            lambda = 0.0;
        }
    }
    if (gnorm > kResidualTol)
        throw NumericError("dual_height: Newton residual " + sci(gnorm) +
                           " above tolerance after " + std::to_string(iter) + " iterations");

    // canonicalize onto the envelope: argmax heights sit on the hull,
    // and zero-mass coordinates get their envelope value
    const TerminalProfile profile = build_profile(f.config(h));
    for (std::size_t c = 0; c < n; ++c)
        h[c] = profile_eval(profile, xs[c]);
    g = f.grad(h);
    if (inf_norm(g) > kResidualTol)
        throw NumericError("dual_height: residual " + sci(inf_norm(g)) +
                           " after envelope canonicalization");
    return h;
}

DualPair lyapunov_from_duality(double t, const std::vector<double>& xs,
                               const std::vector<double>& masses) {
    DualPair pair;
    pair.masses = masses;
    pair.config = ProbeConfig{t, xs, dual_height(t, xs, masses)};
    double L = -rate(pair.config).value;
    for (std::size_t c = 0; c < masses.size(); ++c)
        L += masses[c] * pair.config.hs[c];
    pair.lyapunov = L;
    return pair;
}

TreeCheckResult tree_decomposition_check(const ProbeConfig& config, double t_mid) {
    config.validate();
    if (!in_H_conc(config))
        throw DomainError("tree_decomposition_check: configuration must lie in H_conc");
    if (!(t_mid > 0.0) || !(t_mid < config.t))
        throw DomainError("tree_decomposition_check: t_mid must lie in (0, t)");

    TreeCheckResult out;
    out.t_mid = t_mid;
    const std::vector<double> m = rate_gradient(config);
    out.lhs = lyapunov_from_duality(config.t, config.xs, m).lyapunov;

    const LimitShape shape = build_limit_shape(config);
    const double s_mid = config.t - t_mid;

    // group probes by the live segment their lineage rides at t_mid
    std::vector<int> seg_of(config.size());
    for (std::size_t c = 0; c < config.size(); ++c)
        seg_of[c] = shape.tree.lineage_at(c, s_mid);
    for (std::size_t c = 0; c < config.size(); ++c) {
        if (out.clusters.empty() || seg_of[c] != seg_of[out.clusters.back().branch.front()]) {
            SplitCluster cl;
            cl.position = shape.tree.segments[seg_of[c]].position(s_mid);
            cl.height = shape_eval(shape, t_mid, cl.position);
            out.clusters.push_back(cl);
        }
        out.clusters.back().branch.push_back(c);
        out.clusters.back().mass += m[c];
    }

    std::vector<double> mid_xs, mid_ms, mid_hs;
    for (const auto& cl : out.clusters) {
        mid_xs.push_back(cl.position);
        mid_ms.push_back(cl.mass);
        mid_hs.push_back(cl.height);
    }
    out.rhs = lyapunov_from_duality(t_mid, mid_xs, mid_ms).lyapunov;
    for (const auto& cl : out.clusters) {
        std::vector<double> branch_xs, branch_ms;
        for (std::size_t c : cl.branch) {
            branch_xs.push_back(config.xs[c] - cl.position);
            branch_ms.push_back(m[c]);
        }
        out.rhs +=
            lyapunov_from_duality(config.t - t_mid, branch_xs, branch_ms).lyapunov;
    }

    // the intermediate heights must be dual to the cluster masses
    const std::vector<double> mid_grad =
        rate_gradient(ProbeConfig{t_mid, mid_xs, mid_hs});
    double res = 0.0;
    for (std::size_t a = 0; a < mid_ms.size(); ++a)
        res = std::max(res, std::fabs(mid_grad[a] - mid_ms[a]));
    out.intermediate_residual = res;
    return out;
}

std::vector<ScanPoint> symmetry_breaking_scan(double m, std::size_t grid_points) {
    if (!(m > 0.0) || !std::isfinite(m))
        throw DomainError("symmetry_breaking_scan: total mass must be positive");
    if (grid_points < 2)
        throw DomainError("symmetry_breaking_scan: need at least 2 grid points");

    const std::vector<double> xs = {-1.0, 1.0};
    std::vector<ScanPoint> points;
    points.reserve(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double m_minus =
            m * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        const std::vector<double> masses = {m_minus, m - m_minus};
        const DualPair dual = lyapunov_from_duality(1.0, xs, masses);

        // independent route: corridor functional of the dual's own tree
        const ShockTree tree =
            corridor_masses(build_shock_tree(dual.config), masses);
        const double M = evaluate_M(ensemble_from_tree(tree, masses), 0.0, 1.0);
        if (std::fabs(M - dual.lyapunov) >
            1e-8 * std::max(1.0, std::fabs(dual.lyapunov)))
            throw NumericError("symmetry_breaking_scan: corridor functional " +
                               std::to_string(M) + " disagrees with duality value " +
                               std::to_string(dual.lyapunov) + " at m_minus=" +
                               std::to_string(m_minus));
        points.push_back({m_minus, dual.lyapunov});
    }
    return points;
}

std::string tree_check_to_json(const TreeCheckResult& result) {
    nlohmann::json doc;
    doc["t_mid"] = result.t_mid;
    doc["lhs"] = result.lhs;
    doc["rhs"] = result.rhs;
    doc["intermediate_residual"] = result.intermediate_residual;
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& cl : result.clusters)
        clusters.push_back({{"position", cl.position},
                            {"height", cl.height},
                            {"mass", cl.mass},
                            {"branch", cl.branch}});
    doc["clusters"] = clusters;
    return doc.dump(2);
}

std::string dual_pair_to_json(const DualPair& pair) {
    nlohmann::json doc;
    doc["t"] = pair.config.t;
    doc["xs"] = pair.config.xs;
    doc["heights"] = pair.config.hs;
    doc["masses"] = pair.masses;
    doc["lyapunov"] = pair.lyapunov;
    return doc.dump(2);
}

} // namespace kpz
