#pragma once

#include <algorithm>
#include <cmath>

#include "pidgraph/error.hpp"
#include "pidgraph/image_io.hpp"
#include "pidgraph/result.hpp"

namespace pidgraph {

namespace palette {
inline constexpr Rgb kCode{0, 160, 0};
inline constexpr Rgb kOutlet{220, 0, 0};
inline constexpr Rgb kInlet{0, 0, 220};
inline constexpr Rgb kUnclassified{128, 128, 128};
inline constexpr Rgb kSegment{230, 120, 0};
inline constexpr Rgb kJunctionValid{200, 0, 200};
inline constexpr Rgb kJunctionInvalid{0, 180, 180};
inline constexpr Rgb kSymbol{150, 90, 0};
} // namespace palette

namespace detail {

// One-pixel line through rounded sample points, one sample per pixel step.
inline void draw_line(RgbImage& img, Point a, Point b, Rgb c) {
    const int steps = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(b.x - a.x), std::abs(b.y - a.y)))));
    for (int i = 0; i <= steps; ++i) {
        const Point p = a + (b - a) * (static_cast<double>(i) / steps);
        img.set(static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y)), c);
    }
}

inline void draw_box(RgbImage& img, const BBox& b, Rgb c) {
    for (int x = b.x0; x <= b.x1; ++x) {
        img.set(x, b.y0, c);
        img.set(x, b.y1, c);
    }
    for (int y = b.y0; y <= b.y1; ++y) {
        img.set(b.x0, y, c);
        img.set(b.x1, y, c);
    }
}

inline void draw_marker(RgbImage& img, Point at, int half, Rgb c) {
    const int cx = static_cast<int>(std::lround(at.x)), cy = static_cast<int>(std::lround(at.y));
    for (int d = -half; d <= half; ++d) {
        img.set(cx + d, cy + d, c);
        img.set(cx + d, cy - d, c);
    }
}

} // namespace detail

// Draws every component of `r` over the sheet; an empty result leaves the
// sheet's pixels unchanged.
inline RgbImage render_overlay(const GrayImage& sheet, const Result& r) {
    if (sheet.width() != r.width || sheet.height() != r.height)
        throw DimensionError("result describes a " + std::to_string(r.width) + "x" + std::to_string(r.height) +
                             " sheet but the image is " + std::to_string(sheet.width()) + "x" +
                             std::to_string(sheet.height()));
    RgbImage img(sheet);
    for (const auto& s : r.segments) detail::draw_line(img, s.p, s.q, palette::kSegment);
    for (const auto& c : r.codes) detail::draw_box(img, c.bbox, palette::kCode);
    for (const auto& s : r.symbols) detail::draw_box(img, s.bbox, palette::kSymbol);
    for (const auto& t : r.tags) {
        const Rgb c = !t.kind ? palette::kUnclassified : *t.kind == TagKind::Outlet ? palette::kOutlet : palette::kInlet;
        for (std::size_t i = 0; i < t.vertices.size(); ++i)
            detail::draw_line(img, t.vertices[i], t.vertices[(i + 1) % t.vertices.size()], c);
    }
    for (const auto& j : r.junctions)
        detail::draw_marker(img, j.at, 4, j.valid ? palette::kJunctionValid : palette::kJunctionInvalid);
    return img;
}

} // namespace pidgraph
