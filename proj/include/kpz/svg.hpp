#pragma once

#include <string>

#include "kpz/limit_shape.hpp"

namespace kpz {

// Window and styling for the spacetime figure.  Time runs upward;
// shaded cones, thick shock lines, a thin characteristic fan, probe
// markers at the terminal time and the root at the origin.
struct RenderOptions {
    double t0 = 0.0;
    double t1 = 1.0;
    double x0 = -3.0;
    double x1 = 3.0;
    int characteristic_fan = 24; // terminal feet sampled across the window
    double width = 840.0;
    double height = 600.0;
};

std::string render_svg(const LimitShape& shape, const RenderOptions& options);

} // namespace kpz
