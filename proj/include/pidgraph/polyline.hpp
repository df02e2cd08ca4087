#pragma once

#include <algorithm>
#include <vector>

#include "pidgraph/error.hpp"
#include "pidgraph/geometry.hpp"
#include "pidgraph/image.hpp"
#include "pidgraph/raster.hpp"

namespace pidgraph {

// A closed polyline stores each vertex once; the closing edge is implicit.
struct Polyline {
    std::vector<Point> points;
    bool closed = false;

    double perimeter() const {
        double len = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i) len += distance(points[i - 1], points[i]);
        if (closed && points.size() > 2) len += distance(points.back(), points.front());
        return len;
    }
};

namespace detail {

// Clockwise on screen (y down): E, SE, S, SW, W, NW, N, NE.
constexpr int kCx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kCy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

inline int direction_of(int dx, int dy) {
    for (int d = 0; d < 8; ++d)
        if (kCx[d] == dx && kCy[d] == dy) return d;
    return 0;
}

// Moore-neighbor tracing with Jacob's stopping criterion. `sx,sy` must be the
// raster-first pixel of its component, so its west neighbor is background.
inline Polyline trace_outer_boundary(const BinaryImage& image, int sx, int sy) {
    Polyline contour;
    contour.closed = true;
    contour.points.push_back({double(sx), double(sy)});

    int cx = sx, cy = sy;
    int back = 4; // came from the west
    int first_x = -1, first_y = -1;
    bool have_first = false;
    const std::size_t limit = 4 * static_cast<std::size_t>(image.width()) * image.height() + 8;

    for (std::size_t step = 0; step < limit; ++step) {
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int d = (back + k) % 8;
            if (image.ink(cx + kCx[d], cy + kCy[d])) {
                found = d;
                break;
            }
        }
        if (found < 0) break; // isolated pixel
        const int nx = cx + kCx[found];
        const int ny = cy + kCy[found];
        // The last background cell examined becomes the new backtrack.
        const int prev = (found + 7) % 8;
        const int bx = cx + kCx[prev];
        const int by = cy + kCy[prev];

        if (cx == sx && cy == sy) {
            if (!have_first) {
                first_x = nx;
                first_y = ny;
                have_first = true;
            } else if (nx == first_x && ny == first_y) {
                break;
            }
        }
        cx = nx;
        cy = ny;
        back = direction_of(bx - cx, by - cy);
        if (!(cx == sx && cy == sy)) contour.points.push_back({double(cx), double(cy)});
    }
    return contour;
}

inline void douglas_peucker(const std::vector<Point>& pts, std::size_t first, std::size_t last,
                            double eps, std::vector<char>& keep) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        if (b <= a + 1) continue;
        double worst = -1.0;
        std::size_t index = a;
        for (std::size_t i = a + 1; i < b; ++i) {
            const double d = point_segment_distance(pts[i], pts[a], pts[b]);
            if (d > worst) {
                worst = d;
                index = i;
            }
        }
        if (worst > eps) {
            keep[index] = 1;
            stack.emplace_back(a, index);
            stack.emplace_back(index, b);
        }
    }
}

} // namespace detail

// Outer boundary of every 8-connected component, in component-id order.
inline std::vector<Polyline> extract_contours(const BinaryImage& image) {
    const Labeling lab = label_components(image);
    std::vector<char> traced(lab.components.size(), 0);
    std::vector<Polyline> out(lab.components.size());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const int l = lab.labels[static_cast<std::size_t>(y) * image.width() + x];
            if (l < 0 || traced[l]) continue;
            traced[l] = 1;
            out[l] = detail::trace_outer_boundary(image, x, y);
        }
    }
    return out;
}

// Ramer-Douglas-Peucker. The result is a subset of the input points and every
// dropped point lies within `epsilon` of the simplified edge that spans it.
// Closed rings are split at the point farthest from the centroid and the
// point farthest from that; either split point is dropped afterwards if the
// ring stays within tolerance without it.
inline Polyline simplify_rdp(const Polyline& line, double epsilon) {
    if (!(epsilon > 0.0)) throw ParameterError("RDP epsilon must be positive");
    const auto& pts = line.points;
    const std::size_t n = pts.size();
    if (n <= 2 || (line.closed && n <= 3)) return line;

    if (!line.closed) {
        std::vector<char> keep(n, 0);
        keep[0] = 1;
        keep[n - 1] = 1;
        detail::douglas_peucker(pts, 0, n - 1, epsilon, keep);
        Polyline out{{}, false};
        for (std::size_t i = 0; i < n; ++i)
            if (keep[i]) out.points.push_back(pts[i]);
        return out;
    }

    Point centroid;
    for (auto p : pts) centroid = centroid + p;
    centroid = centroid * (1.0 / n);
    std::size_t a = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (distance(pts[i], centroid) > distance(pts[a], centroid)) a = i;

    // Rotate so the first split point is at index 0 and close the ring.
    std::vector<Point> ring(n + 1);
    for (std::size_t i = 0; i < n; ++i) ring[i] = pts[(a + i) % n];
    ring[n] = ring[0];
    std::size_t b = 1;
    for (std::size_t i = 1; i < n; ++i)
        if (distance(ring[i], ring[0]) > distance(ring[b], ring[0])) b = i;

    std::vector<char> keep(n + 1, 0);
    keep[0] = keep[b] = keep[n] = 1;
    detail::douglas_peucker(ring, 0, b, epsilon, keep);
    detail::douglas_peucker(ring, b, n, epsilon, keep);
    keep[n] = 0;

    auto span_ok = [&](std::size_t from, std::size_t to) {
        // ring indices from..to walking forward, wrapping through n.
        const Point p = ring[from % n];
        const Point q = ring[to % n];
        for (std::size_t i = from + 1; i < to; ++i)
            if (point_segment_distance(ring[i % n], p, q) > epsilon) return false;
        return true;
    };
    for (std::size_t split : {b, std::size_t{0}}) {
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < n; ++i)
            if (keep[i]) kept.push_back(i);
        if (kept.size() <= 3) break;
        auto it = std::find(kept.begin(), kept.end(), split);
        const std::size_t pos = static_cast<std::size_t>(it - kept.begin());
        const std::size_t prev = kept[(pos + kept.size() - 1) % kept.size()];
        const std::size_t next = kept[(pos + 1) % kept.size()];
        const std::size_t from = prev;
        const std::size_t to = next > prev ? next : next + n;
        if (span_ok(from, to)) keep[split] = 0;
    }

    Polyline out{{}, true};
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i]) out.points.push_back(ring[i]);
    return out;
}

} // namespace pidgraph
