#pragma once

#include "kpz/errors.hpp"

namespace kpz {

// Hydrodynamic background profile p(t,x) = -x^2/(2t), t > 0.
// Everything in the toolkit measures heights against this parabola.
inline double parabola_eval(double t, double x) {
    if (!(t > 0.0))
        throw DomainError("parabola_eval: t must be positive, got t=" + std::to_string(t));
    return -x * x / (2.0 * t);
}

// Spatial slope of the background, d/dx p(t,x) = -x/t.
inline double parabola_slope(double t, double x) {
    if (!(t > 0.0))
        throw DomainError("parabola_slope: t must be positive, got t=" + std::to_string(t));
    return -x / t;
}

} // namespace kpz
