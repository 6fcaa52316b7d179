#include "kpz/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "kpz/errors.hpp"

namespace kpz {

namespace {

struct Mapper {
    RenderOptions opt;
    double px(double x) const {
        return 60.0 + (x - opt.x0) / (opt.x1 - opt.x0) * (opt.width - 90.0);
    }
    // time increases upward
    double py(double t) const {
        return 30.0 + (opt.t1 - t) / (opt.t1 - opt.t0) * (opt.height - 80.0);
    }
};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void line(std::ostringstream& os, const Mapper& m, double t_a, double x_a, double t_b,
          double x_b, const char* style) {
    os << "  <line x1=\"" << num(m.px(x_a)) << "\" y1=\"" << num(m.py(t_a)) << "\" x2=\""
       << num(m.px(x_b)) << "\" y2=\"" << num(m.py(t_b)) << "\" " << style << "/>\n";
}

// clip a spacetime segment to the time window (x clipping is done by
// the svg clip path)
bool clip_time(double& t_a, double& x_a, double& t_b, double& x_b, double t0, double t1) {
    if (t_a > t_b) {
        std::swap(t_a, t_b);
        std::swap(x_a, x_b);
    }
    if (t_b < t0 || t_a > t1)
        return false;
    if (t_a < t0) {
        x_a += (x_b - x_a) * (t0 - t_a) / (t_b - t_a);
        t_a = t0;
    }
    if (t_b > t1) {
        x_b += (x_a - x_b) * (t_b - t1) / (t_b - t_a);
        t_b = t1;
    }
    return true;
}

} // namespace

std::string render_svg(const LimitShape& shape, const RenderOptions& opt) {
    if (!(opt.t1 > opt.t0) || !(opt.x1 > opt.x0))
        throw DomainError("render_svg: window must satisfy t0 < t1 and x0 < x1");
    const Mapper m{opt};
    const double tt = shape.tree.t_term;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(opt.width)
       << "\" height=\"" << num(opt.height) << "\" viewBox=\"0 0 " << num(opt.width) << " "
       << num(opt.height) << "\">\n";
    os << "  <defs><clipPath id=\"frame\"><rect x=\"60\" y=\"30\" width=\""
       << num(opt.width - 90.0) << "\" height=\"" << num(opt.height - 80.0)
       << "\"/></clipPath></defs>\n";
    os << "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    os << "  <g clip-path=\"url(#frame)\">\n";

    // cones as shaded wedges from the origin to the terminal time
    for (const Cone& cone : shape.cones) {
        os << "  <polygon points=\"" << num(m.px(0.0)) << "," << num(m.py(0.0));
        os << " " << num(m.px(cone.v_left * tt)) << "," << num(m.py(tt));
        os << " " << num(m.px(cone.v_right * tt)) << "," << num(m.py(tt));
        os << "\" fill=\"#dbe7f5\" stroke=\"none\" opacity=\"0.85\"/>\n";
    }

    // characteristic fan: terminal feet traced backward until they hit
    // a shock or leave the window
    const int fan = std::max(2, opt.characteristic_fan);
    std::vector<double> feet;
    for (int i = 0; i < fan; ++i)
        feet.push_back(opt.x0 + (opt.x1 - opt.x0) * (i + 0.5) / fan);
    for (const Piece& p : shape.profile.pieces) {
        if (std::isfinite(p.a))
            feet.push_back(p.a);
        if (std::isfinite(p.b))
            feet.push_back(p.b);
    }
    const char* thin = "stroke=\"#9fb3c8\" stroke-width=\"0.8\"";
    for (double y : feet) {
        const std::size_t pi = shape.profile.piece_index(y);
        const Piece& piece = shape.profile.pieces[pi];
        if (piece.kind == PieceKind::Parabola) {
            // background ray through the origin
            double ta = 1e-9, xa = 0.0, tb = tt, xb = y;
            if (clip_time(ta, xa, tb, xb, opt.t0 > 0 ? opt.t0 : 1e-9, opt.t1))
                line(os, m, ta, xa, tb, xb, thin);
            continue;
        }
        const double sigma = piece.slope;
        // x(t) = y + sigma (tt - t); find the first shock hit going backward
        double s_stop = tt; // backward duration until stop
        for (const auto& seg : shape.tree.segments) {
            // y + sigma s = x0 + v (s - s0)
            const double denom = sigma - seg.v;
            if (denom == 0.0)
                continue;
            const double s_hit = (seg.x0 - seg.v * seg.s0 - y) / denom;
            if (s_hit > 1e-12 && s_hit >= seg.s0 - 1e-12 && s_hit <= seg.s1 + 1e-12)
                s_stop = std::min(s_stop, s_hit);
        }
        double ta = tt - s_stop, xa = y + sigma * s_stop, tb = tt, xb = y;
        if (clip_time(ta, xa, tb, xb, opt.t0, opt.t1))
            line(os, m, ta, xa, tb, xb, thin);
    }

    // shocks on top
    const char* thick = "stroke=\"#1f3a5f\" stroke-width=\"2.4\"";
    for (const auto& seg : shape.tree.segments) {
        double ta = tt - seg.s0, xa = seg.position(seg.s0);
        double tb = tt - seg.s1, xb = seg.position(seg.s1);
        if (clip_time(ta, xa, tb, xb, opt.t0, opt.t1))
            line(os, m, ta, xa, tb, xb, thick);
    }

    // probe markers and the root
    for (double x : shape.tree.config.xs)
        os << "  <circle cx=\"" << num(m.px(x)) << "\" cy=\"" << num(m.py(tt))
           << "\" r=\"4\" fill=\"#c0392b\"/>\n";
    if (opt.t0 <= 0.0)
        os << "  <circle cx=\"" << num(m.px(0.0)) << "\" cy=\"" << num(m.py(0.0))
           << "\" r=\"4\" fill=\"#1f3a5f\"/>\n";
    os << "  </g>\n";

    // frame and axis labels
    os << "  <rect x=\"60\" y=\"30\" width=\"" << num(opt.width - 90.0) << "\" height=\""
       << num(opt.height - 80.0) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "  <text x=\"" << num(opt.width / 2.0) << "\" y=\"" << num(opt.height - 18.0)
       << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">x</text>\n";
    os << "  <text x=\"20\" y=\"" << num(opt.height / 2.0)
       << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">t</text>\n";
    for (double t : {opt.t0, opt.t1})
        os << "  <text x=\"52\" y=\"" << num(m.py(t) + 4.0)
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << num(t)
           << "</text>\n";
    for (double x : {opt.x0, opt.x1})
        os << "  <text x=\"" << num(m.px(x)) << "\" y=\"" << num(opt.height - 36.0)
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
           << num(x) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace kpz
