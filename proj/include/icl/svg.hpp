#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "icl/curve.hpp"

namespace icl {

// Static figure of a curve over the horizontal axis: fixed 800x500 viewBox,
// the enclosed region filled at 25% opacity, the curve stroked black. Direct
// text emission; no plotting dependency.
inline std::string curve_svg(const DiscreteCurve& curve) {
    const double width = 800.0, height = 500.0, margin = 40.0;
    double x_min = curve.pts.front().x, x_max = x_min;
    double y_min = 0.0, y_max = 0.0;
    for (const Vec2& p : curve.pts) {
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    }
    const double span_x = x_max - x_min;
    const double span_y = y_max - y_min;
    const double scale = std::min((width - 2.0 * margin) / (span_x > 0.0 ? span_x : 1.0),
                                  (height - 2.0 * margin) / (span_y > 0.0 ? span_y : 1.0));
    auto map_x = [&](double x) { return margin + (x - x_min) * scale; };
    auto map_y = [&](double y) { return height - margin - (y - y_min) * scale; };
    auto coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };

    std::string path;
    for (std::size_t i = 0; i < curve.pts.size(); ++i) {
        path += (i == 0) ? "M " : " L ";
        path += coord(map_x(curve.pts[i].x)) + " " + coord(map_y(curve.pts[i].y));
    }

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\">\n";
    // region between the curve and the axis chord, closed back to the start
    out += "  <path d=\"" + path + " Z\" fill=\"#000000\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
    // axis through y = 0
    out += "  <line x1=\"" + coord(margin / 2.0) + "\" y1=\"" + coord(map_y(0.0)) + "\" x2=\"" +
           coord(width - margin / 2.0) + "\" y2=\"" + coord(map_y(0.0)) +
           "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    out += "  <path d=\"" + path +
           "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace icl
