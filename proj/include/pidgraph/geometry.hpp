#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace pidgraph {

// Pixel coordinates: origin top-left, y grows downward, pixel centers sit on
// integer coordinates.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
    friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Inclusive pixel rectangle.
struct BBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
    long long area() const {
        return valid() ? static_cast<long long>(width()) * height() : 0;
    }
    bool valid() const { return x0 <= x1 && y0 <= y1; }
    bool contains(int x, int y) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
    bool contains(Point p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
    Point center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }

    BBox expanded(int margin) const {
        return {x0 - margin, y0 - margin, x1 + margin, y1 + margin};
    }
    BBox clipped(int width, int height) const {
        return {std::max(x0, 0), std::max(y0, 0), std::min(x1, width - 1),
                std::min(y1, height - 1)};
    }

    friend bool operator==(const BBox&, const BBox&) = default;
};

inline BBox intersect(const BBox& a, const BBox& b) {
    return {std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
            std::min(a.y1, b.y1)};
}

inline BBox unite(const BBox& a, const BBox& b) {
    return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
            std::max(a.y1, b.y1)};
}

inline double iou(const BBox& a, const BBox& b) {
    const long long inter = intersect(a, b).area();
    const long long uni = a.area() + b.area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

inline double point_segment_distance(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

// Intersection of the infinite lines through (a1,a2) and (b1,b2); empty when
// parallel or degenerate.
inline std::optional<Point> line_intersection(Point a1, Point a2, Point b1, Point b2) {
    const Point r = a2 - a1;
    const Point s = b2 - b1;
    const double denom = cross(r, s);
    const double scale = norm(r) * norm(s);
    if (scale == 0.0 || std::abs(denom) <= 1e-12 * scale) return std::nullopt;
    const double t = cross(b1 - a1, s) / denom;
    return a1 + r * t;
}

inline bool segments_cross(Point a1, Point a2, Point b1, Point b2) {
    const double d1 = cross(a2 - a1, b1 - a1);
    const double d2 = cross(a2 - a1, b2 - a1);
    const double d3 = cross(b2 - b1, a1 - b1);
    const double d4 = cross(b2 - b1, a2 - b1);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 &&
           d3 != 0 && d4 != 0;
}

inline double segment_segment_distance(Point a1, Point a2, Point b1, Point b2) {
    if (segments_cross(a1, a2, b1, b2)) return 0.0;
    return std::min({point_segment_distance(a1, b1, b2), point_segment_distance(a2, b1, b2),
                     point_segment_distance(b1, a1, a2), point_segment_distance(b2, a1, a2)});
}

// Euclidean gap between a segment and the rectangle spanned by a box's
// corner coordinates; zero when they touch or overlap.
inline double segment_box_distance(Point a, Point b, const BBox& box) {
    if (box.contains(a) || box.contains(b)) return 0.0;
    const Point c[4] = {{double(box.x0), double(box.y0)},
                        {double(box.x1), double(box.y0)},
                        {double(box.x1), double(box.y1)},
                        {double(box.x0), double(box.y1)}};
    double best = INFINITY;
    for (int i = 0; i < 4; ++i) {
        best = std::min(best, segment_segment_distance(a, b, c[i], c[(i + 1) % 4]));
    }
    return best;
}

} // namespace pidgraph
