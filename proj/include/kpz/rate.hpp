#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "kpz/probe.hpp"
#include "kpz/profile.hpp"

namespace kpz {

// Rate of an n-point upper-tail deviation together with its gradient in
// the probe heights.  The value always refers to the concave envelope
// extension, so it is defined (finite, convex) for arbitrary heights.
struct RateResult {
    double value = 0.0;
    std::vector<double> gradient;                          // one entry per probe
    std::vector<std::size_t> reduced_set;                  // probes on the envelope
    std::vector<std::pair<std::size_t, double>> per_piece; // piece index -> contribution
};

// I(t, xs, hs) = integral of (f'^2 - p'^2)/2 over the envelope f.
// Each linear piece [a,b] with slope s contributes
//   s^2 (b-a)/2 - (b^3 - a^3)/(6 t^2),
// parabola arcs contribute nothing.
RateResult rate(const ProbeConfig& config);

// Gradient of the extended rate in the heights: the kink angle
// (left slope minus right slope) at each supported probe, zero off the
// envelope.  Throws DomainError for configurations outside H.
std::vector<double> rate_gradient(const ProbeConfig& config);

std::string rate_result_to_json(const RateResult& result);

} // namespace kpz
