#pragma once

#include <cmath>
#include <span>

#include "pidgraph/geometry.hpp"
#include "pidgraph/image.hpp"

namespace pidgraph {

// Sets every pixel whose center lies within thickness/2 of segment ab.
inline void draw_segment(BinaryImage& img, Point a, Point b, double thickness) {
    const double r = thickness / 2.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
    const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
    const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (point_segment_distance({double(x), double(y)}, a, b) <= r + 1e-9) img.set(x, y, true);
}

inline void draw_polygon(BinaryImage& img, std::span<const Point> vertices, double thickness) {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        draw_segment(img, vertices[i], vertices[(i + 1) % vertices.size()], thickness);
}

inline void fill_box(BinaryImage& img, const BBox& box, bool value = true) {
    const BBox c = box.clipped(img.width(), img.height());
    for (int y = c.y0; y <= c.y1; ++y)
        for (int x = c.x0; x <= c.x1; ++x) img.set(x, y, value);
}

} // namespace pidgraph
