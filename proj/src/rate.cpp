#include "kpz/rate.hpp"

#include <cmath>
#include <json.hpp>

#include "kpz/errors.hpp"

namespace kpz {

RateResult rate(const ProbeConfig& config) {
    config.validate();
    RateResult out;
    const TerminalProfile profile = build_profile(config);
    out.reduced_set = reduce_indices(config);

    const double t = config.t;
    double value = 0.0;
    for (std::size_t i = 0; i < profile.pieces.size(); ++i) {
        const Piece& p = profile.pieces[i];
        double contrib = 0.0;
        if (p.kind == PieceKind::Linear) {
            // integral of (f'^2 - p'^2)/2 over [a,b] with f' = slope
            contrib = 0.5 * p.slope * p.slope * (p.b - p.a) -
                      (p.b * p.b * p.b - p.a * p.a * p.a) / (6.0 * t * t);
        }
        // parabola arcs vanish pointwise (outer flanks cancel exactly)
        value += contrib;
        out.per_piece.emplace_back(i, contrib);
    }
    if (value < 0.0) {
        if (value < -1e-9)
            throw NumericError("rate: negative value " + std::to_string(value) +
                               " from piece integration");
        value = 0.0; // clamp integration round-off on near-parabola envelopes
    }
    out.value = value;

    out.gradient.assign(config.size(), 0.0);
    for (std::size_t c : out.reduced_set) {
        const double x = config.xs[c];
        const double angle = profile.slope_left(x) - profile.slope_right(x);
        out.gradient[c] = std::max(angle, 0.0);
    }
    return out;
}

std::vector<double> rate_gradient(const ProbeConfig& config) {
    config.validate();
    if (classify(config) == MembershipClass::OutsideH)
        throw DomainError("rate_gradient: configuration lies outside H "
                          "(a height is below the parabola)");
    return rate(config).gradient;
}

std::string rate_result_to_json(const RateResult& result) {
    nlohmann::json doc;
    doc["value"] = result.value;
    doc["gradient"] = result.gradient;
    doc["reduced_set"] = result.reduced_set;
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& [idx, contrib] : result.per_piece)
        pieces.push_back({{"piece", idx}, {"contribution", contrib}});
    doc["per_piece"] = pieces;
    return doc.dump(2);
}

} // namespace kpz
