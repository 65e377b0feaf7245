#pragma once

// Deterministic polygon rendering: SVG with the hull plus bound overlays,
// and a coarse ASCII grid. Identical inputs produce byte-identical output;
// rationals are printed at a fixed 6-decimal precision with integer-only
// arithmetic.

#include <string>
#include <vector>

#include "aswl/analysis.hpp"

namespace aswl {

// Fixed-point decimal with 6 fractional digits, rounding half away from zero.
inline std::string rat_decimal6(const Rat& r) {
    Int num = rat_num(r), den = rat_den(r);
    bool neg = num < 0;
    if (neg) num = -num;
    Int scaled = (num * 1000000 * 2 + den) / (2 * den);
    Int ip = scaled / 1000000, fp = scaled % 1000000;
    std::string frac = fp.str();
    frac.insert(frac.begin(), 6 - frac.size(), '0');
    return (neg && scaled != 0 ? "-" : "") + ip.str() + "." + frac;
}

struct RenderBounds {
    std::vector<std::pair<long, Rat>> lower;  // polyline vertices
    std::vector<std::pair<long, Rat>> upper;
};

namespace detail {

inline std::string svg_polyline(const std::vector<std::pair<long, Rat>>& pts, const Rat& ymax, long margin,
                                long xstep, long yscale, const std::string& style) {
    std::string s = "  <polyline fill=\"none\" " + style + " points=\"";
    bool first = true;
    for (const auto& [k, v] : pts) {
        if (!first) s += " ";
        first = false;
        Rat y = (ymax - v) * yscale + margin;
        s += std::to_string(margin + k * xstep) + "," + rat_decimal6(y);
    }
    s += "\"/>\n";
    return s;
}

}  // namespace detail

namespace detail {
inline Rat render_ymax(const NewtonPolygon& np, const RenderBounds* bounds) {
    Rat ymax = 0;
    for (const auto& [k, v] : np.vertices)
        if (v > ymax) ymax = v;
    if (bounds) {
        for (const auto& [k, v] : bounds->upper)
            if (v > ymax) ymax = v;
        for (const auto& [k, v] : bounds->lower)
            if (v > ymax) ymax = v;
    }
    return ymax;
}
}  // namespace detail

inline std::string render_polygon_svg(const NewtonPolygon& np, const RenderBounds* bounds) {
    const long margin = 40, xstep = 60, yscale = 60;
    Rat ymax = detail::render_ymax(np, bounds);
    long kmax = np.last_idx();
    long width = 2 * margin + kmax * xstep;
    Rat heightr = Rat(2 * margin) + ymax * yscale;
    Int hnum = (rat_num(heightr) + rat_den(heightr) - 1) / rat_den(heightr);
    long height = static_cast<long>(hnum);

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
    // axes
    s += "  <line x1=\"" + std::to_string(margin) + "\" y1=\"" + std::to_string(height - margin) + "\" x2=\"" +
         std::to_string(width - margin) + "\" y2=\"" + std::to_string(height - margin) +
         "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    s += "  <line x1=\"" + std::to_string(margin) + "\" y1=\"" + std::to_string(margin) + "\" x2=\"" +
         std::to_string(margin) + "\" y2=\"" + std::to_string(height - margin) +
         "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    // the three polylines share the coordinate map y = margin + (ymax - v)*yscale
    if (bounds && !bounds->lower.empty())
        s += detail::svg_polyline(bounds->lower, ymax, margin, xstep, yscale,
                                  "stroke=\"#2a77c9\" stroke-width=\"1\" stroke-dasharray=\"6,3\"");
    if (bounds && !bounds->upper.empty())
        s += detail::svg_polyline(bounds->upper, ymax, margin, xstep, yscale,
                                  "stroke=\"#c9772a\" stroke-width=\"1\" stroke-dasharray=\"2,3\"");
    s += detail::svg_polyline(np.vertices, ymax, margin, xstep, yscale, "stroke=\"#000\" stroke-width=\"2\"");
    for (const auto& [k, v] : np.vertices) {
        Rat y = (ymax - v) * yscale + margin;
        s += "  <circle cx=\"" + std::to_string(margin + k * xstep) + "\" cy=\"" + rat_decimal6(y) +
             "\" r=\"3\" fill=\"#000\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

inline std::string render_polygon_ascii(const NewtonPolygon& np, const RenderBounds* bounds) {
    const long rows = 17;
    long kmax = np.last_idx();
    Rat ymax = detail::render_ymax(np, bounds);
    if (ymax == 0) ymax = 1;
    const long cols = kmax + 1;
    std::vector<std::string> grid(static_cast<std::size_t>(rows), std::string(static_cast<std::size_t>(cols), ' '));
    auto rowof = [&](const Rat& v) {
        Rat t = v / ymax * (rows - 1);
        Int r = (rat_num(t) * 2 + rat_den(t)) / (2 * rat_den(t));  // round to nearest
        long row = rows - 1 - static_cast<long>(r);
        return std::min<long>(rows - 1, std::max<long>(0, row));
    };
    auto put = [&](long k, const Rat& v, char c) {
        if (k < 0 || k > kmax) return;
        long r = rowof(v);
        char& cell = grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
        cell = (cell == ' ' || cell == c) ? c : '#';
    };
    if (bounds) {
        for (const auto& [k, v] : bounds->lower)
            if (k <= kmax) put(k, v, '.');
        for (const auto& [k, v] : bounds->upper)
            if (k <= kmax) put(k, v, 'u');
    }
    for (long k = np.first_idx(); k <= kmax; ++k) put(k, np.height(k), '*');
    std::string out;
    for (const auto& row : grid) out += "|" + row + "\n";
    out += "+";
    out += std::string(static_cast<std::size_t>(cols), '-');
    out += "  index 0.." + std::to_string(kmax) + ", top value " + rat_to_string(ymax) + "\n";
    return out;
}

}  // namespace aswl
