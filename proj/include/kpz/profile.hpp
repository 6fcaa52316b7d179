#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "kpz/probe.hpp"

namespace kpz {

enum class PieceKind { Parabola, Linear };

// One piece of the terminal profile on [a,b].  Parabola pieces follow
// the background -x^2/(2t) and carry no coefficients of their own;
// linear pieces are slope*x + intercept.  a = -inf / b = +inf on the
// two outer parabola flanks.
struct Piece {
    PieceKind kind = PieceKind::Parabola;
    double a = 0.0;
    double b = 0.0;
    double slope = 0.0;     // linear pieces only
    double intercept = 0.0; // linear pieces only
};

// Concave terminal profile: the upper concave envelope of the parabola
// p(t,.) and the probe points.  Alternates parabola arcs and linear
// segments; kinks (slope drops) occur only at supported probe positions.
struct TerminalProfile {
    double t = 1.0;
    std::vector<Piece> pieces;
    std::vector<double> kinks;

    // Slopes immediately left/right of x (equal except at kinks).
    double slope_left(double x) const;
    double slope_right(double x) const;

    // Index of the piece whose interval contains x (ties resolve to the
    // earlier piece so evaluation at a boundary is well defined).
    std::size_t piece_index(double x) const;
};

// Envelope value at x.
double profile_eval(const TerminalProfile& profile, double x);

// Builds the envelope.  Accepts any heights (points below the parabola
// simply do not support the hull); operations that require membership
// in H perform their own checks.
TerminalProfile build_profile(const ProbeConfig& config);

// Indices (0-based, ascending) of probes lying on the envelope:
// c is in the reduced set iff a line through (x_c,h_c) exists that
// dominates the parabola and every other probe.  The condition is
// closed: boundary tangencies count as supported.
std::vector<std::size_t> reduce_indices(const ProbeConfig& config);

// JSON round trip.  Unbounded interval ends serialize as the strings
// "-inf" / "inf".
std::string profile_to_json(const TerminalProfile& profile);
TerminalProfile profile_from_json(const std::string& text);

} // namespace kpz
