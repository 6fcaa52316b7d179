#include "kpz/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "kpz/parabola.hpp"

namespace kpz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlopeRel = 1e-9; // relative slope-comparison tolerance

double slope_tol(double a, double b) {
    return kSlopeRel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Tangency data of one probe relative to the parabola.  The radicand
// x^2 + 2 t h is the squared half-width of the tangency interval;
// probes on the parabola (radicand 0 up to rounding) get a single
// support slope -x/t.
struct Support {
    int sign = 0; // -1 below parabola, 0 on it, +1 above
    double foot_left = 0.0;
    double foot_right = 0.0;
    double sigma_min = 0.0; // slope of the right tangent
    double sigma_max = 0.0; // slope of the left tangent
};

Support support_of(double t, double x, double h) {
    Support s;
    const double rad = x * x + 2.0 * t * h;
    const double eps = 1e-12 * std::max({1.0, x * x, 2.0 * t * std::fabs(h)});
    if (rad < -eps) {
        s.sign = -1;
        return s;
    }
    s.sign = rad > eps ? +1 : 0;
    const double root = s.sign > 0 ? std::sqrt(rad) : 0.0;
    s.foot_left = x - root;
    s.foot_right = x + root;
    s.sigma_max = -s.foot_left / t;
    s.sigma_min = -s.foot_right / t;
    return s;
}

// Probes that admit a line through them dominating both the parabola
// and every other probe.  The feasibility window is closed: boundary
// tangencies stay supported.
std::vector<std::size_t> supported_indices(const ProbeConfig& config,
                                           const std::vector<Support>& sup) {
    std::vector<std::size_t> out;
    const std::size_t n = config.size();
    for (std::size_t c = 0; c < n; ++c) {
        if (sup[c].sign < 0)
            continue;
        double lo = sup[c].sigma_min;
        double hi = sup[c].sigma_max;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == c || sup[j].sign < 0)
                continue; // points below the parabola are dominated for free
            const double s = (config.hs[j] - config.hs[c]) / (config.xs[j] - config.xs[c]);
            if (config.xs[j] > config.xs[c])
                lo = std::max(lo, s);
            else
                hi = std::min(hi, s);
        }
        if (lo <= hi + slope_tol(lo, hi))
            out.push_back(c);
    }
    return out;
}

double piece_value(const Piece& p, double t, double x) {
    return p.kind == PieceKind::Linear ? p.slope * x + p.intercept
                                       : parabola_eval(t, x);
}

double piece_slope(const Piece& p, double t, double x) {
    return p.kind == PieceKind::Linear ? p.slope : parabola_slope(t, x);
}

} // namespace

void ProbeConfig::validate() const {
    if (!(t > 0.0) || !(t <= 1.0) || !std::isfinite(t))
        throw DomainError("ProbeConfig: t must lie in (0,1], got t=" + std::to_string(t));
    if (xs.size() != hs.size())
        throw DomainError("ProbeConfig: xs and hs sizes differ (" +
                          std::to_string(xs.size()) + " vs " + std::to_string(hs.size()) + ")");
    if (xs.empty())
        throw DomainError("ProbeConfig: needs at least one probe");
    if (xs.size() > 64)
        throw DomainError("ProbeConfig: probe count capped at 64, got " +
                          std::to_string(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(hs[i]))
            throw DomainError("ProbeConfig: non-finite entry at probe " + std::to_string(i));
        if (i > 0 && !(xs[i] > xs[i - 1]))
            throw DomainError("ProbeConfig: xs must be strictly increasing at index " +
                              std::to_string(i));
    }
}

std::size_t TerminalProfile::piece_index(double x) const {
    // first piece whose right end reaches x; boundary ties go left
    auto it = std::partition_point(pieces.begin(), pieces.end(),
                                   [x](const Piece& p) { return p.b < x; });
    if (it == pieces.end())
        --it;
    return static_cast<std::size_t>(it - pieces.begin());
}

double TerminalProfile::slope_left(double x) const {
    std::size_t i = piece_index(x);
    if (i > 0 && pieces[i].a == x)
        --i; // sitting on a boundary: the left neighbour owns the left slope
    return piece_slope(pieces[i], t, x);
}

double TerminalProfile::slope_right(double x) const {
    auto it = std::partition_point(pieces.begin(), pieces.end(),
                                   [x](const Piece& p) { return p.b <= x; });
    if (it == pieces.end())
        --it;
    return piece_slope(*it, t, x);
}

double profile_eval(const TerminalProfile& profile, double x) {
    return piece_value(profile.pieces[profile.piece_index(x)], profile.t, x);
}

std::vector<std::size_t> reduce_indices(const ProbeConfig& config) {
    config.validate();
    std::vector<Support> sup;
    sup.reserve(config.size());
    for (std::size_t c = 0; c < config.size(); ++c)
        sup.push_back(support_of(config.t, config.xs[c], config.hs[c]));
    return supported_indices(config, sup);
}

TerminalProfile build_profile(const ProbeConfig& config) {
    config.validate();
    const double t = config.t;

    std::vector<Support> sup;
    sup.reserve(config.size());
    for (std::size_t c = 0; c < config.size(); ++c)
        sup.push_back(support_of(config.t, config.xs[c], config.hs[c]));
    const std::vector<std::size_t> redu = supported_indices(config, sup);

    TerminalProfile profile;
    profile.t = t;

    std::vector<Piece> raw;
    if (redu.empty()) {
        raw.push_back({PieceKind::Parabola, -kInf, kInf, 0.0, 0.0});
    } else {
        auto X = [&](std::size_t i) { return config.xs[redu[i]]; };
        auto H = [&](std::size_t i) { return config.hs[redu[i]]; };
        auto S = [&](std::size_t i) -> const Support& { return sup[redu[i]]; };
        const std::size_t k = redu.size();

        auto tangent = [&](double foot, double xa, double ha, double lo, double hi) {
            // tangent line anchored at the probe so envelope values at
            // supported probes reproduce the heights exactly
            const double slope = -foot / t;
            raw.push_back({PieceKind::Linear, lo, hi, slope, ha - slope * xa});
        };

        raw.push_back({PieceKind::Parabola, -kInf, S(0).foot_left, 0.0, 0.0});
        if (S(0).foot_left < X(0))
            tangent(S(0).foot_left, X(0), H(0), S(0).foot_left, X(0));

        for (std::size_t i = 0; i + 1 < k; ++i) {
            const double s = (H(i + 1) - H(i)) / (X(i + 1) - X(i));
            // the parabola pokes above the chord iff its tangency point
            // of matching slope lies between the probes and clears it
            const double xstar = -s * t;
            bool arc = false;
            if (xstar > X(i) && xstar < X(i + 1)) {
                const double chord_at = H(i) + s * (xstar - X(i));
                const double gap_tol =
                    1e-12 * std::max({1.0, std::fabs(chord_at), xstar * xstar / (2.0 * t)});
                arc = parabola_eval(t, xstar) > chord_at + gap_tol;
            }
            if (!arc) {
                raw.push_back({PieceKind::Linear, X(i), X(i + 1), s, H(i) - s * X(i)});
            } else {
                const double a_out = S(i).foot_right;
                const double a_in = S(i + 1).foot_left;
                if (a_out > X(i))
                    tangent(a_out, X(i), H(i), X(i), a_out);
                raw.push_back({PieceKind::Parabola, std::max(X(i), a_out),
                               std::min(a_in, X(i + 1)), 0.0, 0.0});
                if (a_in < X(i + 1))
                    tangent(a_in, X(i + 1), H(i + 1), a_in, X(i + 1));
            }
        }

        if (S(k - 1).foot_right > X(k - 1))
            tangent(S(k - 1).foot_right, X(k - 1), H(k - 1), X(k - 1), S(k - 1).foot_right);
        raw.push_back({PieceKind::Parabola, S(k - 1).foot_right, kInf, 0.0, 0.0});
    }

    // prune degenerate stubs, fuse adjacent parabola arcs; only pieces
    // with two finite ends can degenerate
    for (const Piece& p : raw) {
        if (std::isfinite(p.a) && std::isfinite(p.b) &&
            p.b - p.a <= 1e-14 * std::max({1.0, std::fabs(p.a), std::fabs(p.b)}))
            continue;
        if (!profile.pieces.empty() && p.kind == PieceKind::Parabola &&
            profile.pieces.back().kind == PieceKind::Parabola) {
            profile.pieces.back().b = p.b;
            continue;
        }
        profile.pieces.push_back(p);
    }

    for (std::size_t c : redu) {
        const double x = config.xs[c];
        const double dl = profile.slope_left(x);
        const double dr = profile.slope_right(x);
        if (dl - dr > slope_tol(dl, dr))
            profile.kinks.push_back(x);
    }
    return profile;
}

MembershipClass classify(const ProbeConfig& config) {
    config.validate();
    bool boundary = false;
    for (std::size_t c = 0; c < config.size(); ++c) {
        const Support s = support_of(config.t, config.xs[c], config.hs[c]);
        if (s.sign < 0)
            return MembershipClass::OutsideH;
        if (s.sign == 0)
            boundary = true;
    }
    if (boundary)
        return MembershipClass::OnBoundaryH;
    if (reduce_indices(config).size() < config.size())
        return MembershipClass::InHNotConc;
    const TerminalProfile profile = build_profile(config);
    for (double x : config.xs) {
        const double dl = profile.slope_left(x);
        const double dr = profile.slope_right(x);
        if (dl - dr <= slope_tol(dl, dr))
            return MembershipClass::InHconc; // zero kink angle: degenerate
    }
    return MembershipClass::InHconcInterior;
}

bool in_H_conc(const ProbeConfig& config) {
    config.validate();
    for (std::size_t c = 0; c < config.size(); ++c)
        if (support_of(config.t, config.xs[c], config.hs[c]).sign < 0)
            return false;
    return reduce_indices(config).size() == config.size();
}

const char* to_string(MembershipClass c) {
    switch (c) {
    case MembershipClass::OutsideH: return "OutsideH";
    case MembershipClass::OnBoundaryH: return "OnBoundaryH";
    case MembershipClass::InHNotConc: return "InHNotConc";
    case MembershipClass::InHconcInterior: return "InHconcInterior";
    case MembershipClass::InHconc: return "InHconc";
    }
    return "?";
}

std::string profile_to_json(const TerminalProfile& profile) {
    nlohmann::json doc;
    doc["t"] = profile.t;
    doc["kinks"] = profile.kinks;
    nlohmann::json pieces = nlohmann::json::array();
    for (const Piece& p : profile.pieces) {
        nlohmann::json jp;
        jp["kind"] = p.kind == PieceKind::Linear ? "linear" : "parabola";
        if (std::isinf(p.a))
            jp["a"] = "-inf";
        else
            jp["a"] = p.a;
        if (std::isinf(p.b))
            jp["b"] = "inf";
        else
            jp["b"] = p.b;
        if (p.kind == PieceKind::Linear) {
            jp["slope"] = p.slope;
            jp["intercept"] = p.intercept;
        }
        pieces.push_back(jp);
    }
    doc["pieces"] = pieces;
    return doc.dump(2);
}

TerminalProfile profile_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    TerminalProfile profile;
    profile.t = doc.at("t").get<double>();
    profile.kinks = doc.at("kinks").get<std::vector<double>>();
    auto bound = [](const nlohmann::json& v, double sign_inf) {
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            if (s == "inf")
                return kInf;
            if (s == "-inf")
                return -kInf;
            throw DomainError("profile_from_json: bad interval bound \"" + s + "\"");
        }
        (void)sign_inf;
        return v.get<double>();
    };
    for (const auto& jp : doc.at("pieces")) {
        Piece p;
        const std::string kind = jp.at("kind").get<std::string>();
        if (kind == "linear")
            p.kind = PieceKind::Linear;
        else if (kind == "parabola")
            p.kind = PieceKind::Parabola;
        else
            throw DomainError("profile_from_json: unknown piece kind \"" + kind + "\"");
        p.a = bound(jp.at("a"), -1.0);
        p.b = bound(jp.at("b"), +1.0);
        if (p.kind == PieceKind::Linear) {
            p.slope = jp.at("slope").get<double>();
            p.intercept = jp.at("intercept").get<double>();
        }
        profile.pieces.push_back(p);
    }
    if (profile.pieces.empty())
        throw DomainError("profile_from_json: empty piece list");
    return profile;
}

} // namespace kpz
