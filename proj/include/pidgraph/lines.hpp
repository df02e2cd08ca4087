#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "pidgraph/geometry.hpp"
#include "pidgraph/hough.hpp"
#include "pidgraph/raster.hpp"

namespace pidgraph {

struct Segment {
    int id = 0;
    Point p;
    Point q;

    double length() const { return distance(p, q); }
};

enum Edge { kTop = 0, kRight = 1, kBottom = 2, kLeft = 3 };

struct Junction {
    Point at;
    int a = 0; // smaller segment id
    int b = 0;
    std::array<int, 4> crossings{}; // runs per edge: top, right, bottom, left
    int arm_count = 0;
    bool valid = false;
};

struct MergeParams {
    double angle = 1.5; // degrees
    double gap = 5.0;
    double offset = 2.0;
    // Refit and endpoint walk on the skeleton: pixels within `support` of a
    // segment take part, and a walk tolerates `walk_gap` empty steps.
    double support = 1.5;
    int walk_gap = 4;
};

namespace detail {

// Endpoint order is lexicographic on (x, y) so equal segments compare equal.
inline void normalize(Segment& s) {
    if (std::tie(s.q.x, s.q.y) < std::tie(s.p.x, s.p.y)) std::swap(s.p, s.q);
}

inline void assign_ids(std::vector<Segment>& segs) {
    for (auto& s : segs) normalize(s);
    auto key = [](const Segment& s) {
        return std::make_tuple(std::min(s.p.y, s.q.y), std::min(s.p.x, s.q.x),
                               std::max(s.p.y, s.q.y), std::max(s.p.x, s.q.x));
    };
    std::stable_sort(segs.begin(), segs.end(),
                     [&](const Segment& a, const Segment& b) { return key(a) < key(b); });
    for (std::size_t i = 0; i < segs.size(); ++i) segs[i].id = static_cast<int>(i);
}

// Undirected angle between two directions, in degrees within [0, 90].
inline double angle_between(Point u, Point v) {
    const double c = std::abs(dot(u, v)) / (norm(u) * norm(v));
    return std::acos(std::min(1.0, c)) * 180.0 / std::numbers::pi;
}

inline bool mergeable(const Segment& s, const Segment& t, const MergeParams& m) {
    const Segment& lng = s.length() >= t.length() ? s : t;
    const Segment& sht = s.length() >= t.length() ? t : s;
    const Point d = lng.q - lng.p;
    const double len = norm(d);
    if (len == 0.0) return false;
    if (sht.length() > 0.0 && angle_between(d, sht.q - sht.p) > m.angle) return false;
    const Point u = d * (1.0 / len);
    const Point n{-u.y, u.x};
    if (std::abs(dot(sht.p - lng.p, n)) > m.offset) return false;
    if (std::abs(dot(sht.q - lng.p, n)) > m.offset) return false;
    const double a0 = dot(sht.p - lng.p, u);
    const double a1 = dot(sht.q - lng.p, u);
    const double lo = std::min(a0, a1), hi = std::max(a0, a1);
    const double gap = std::max(lo - len, 0.0 - hi);
    return gap <= m.gap;
}

} // namespace detail

// Groups are the transitive closure of the pairwise merge test. Each group
// becomes the span of its endpoints projected onto the line of its longest
// member.
inline std::vector<Segment> merge_collinear(const std::vector<Segment>& segments,
                                            const MergeParams& params = {}) {
    const std::size_t n = segments.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (detail::mergeable(segments[i], segments[j], params)) parent[find(i)] = find(j);

    std::vector<std::vector<std::size_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

    std::vector<Segment> out;
    for (const auto& g : groups) {
        if (g.empty()) continue;
        std::size_t longest = g.front();
        for (auto i : g)
            if (segments[i].length() > segments[longest].length()) longest = i;
        const Segment& base = segments[longest];
        Segment s = base;
        if (g.size() > 1 && base.length() > 0.0) {
            const Point u = (base.q - base.p) * (1.0 / base.length());
            double lo = 0.0, hi = base.length();
            for (auto i : g) {
                for (Point e : {segments[i].p, segments[i].q}) {
                    const double t = dot(e - base.p, u);
                    lo = std::min(lo, t);
                    hi = std::max(hi, t);
                }
            }
            s.p = base.p + u * lo;
            s.q = base.p + u * hi;
        }
        out.push_back(s);
    }
    detail::assign_ids(out);
    return out;
}

namespace detail {

// Total least squares line through the skeleton pixels near `s`, spanning
// their projections. Unchanged when fewer than two pixels support it.
inline Segment refit(const BinaryImage& skeleton, const Segment& s, double support) {
    const int r = static_cast<int>(std::ceil(support));
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(s.p.x, s.q.x))) - r);
    const int x1 = std::min(skeleton.width() - 1, static_cast<int>(std::ceil(std::max(s.p.x, s.q.x))) + r);
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(s.p.y, s.q.y))) - r);
    const int y1 = std::min(skeleton.height() - 1, static_cast<int>(std::ceil(std::max(s.p.y, s.q.y))) + r);
    std::vector<Point> pts;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (skeleton.ink(x, y) && point_segment_distance({double(x), double(y)}, s.p, s.q) <= support)
                pts.push_back({double(x), double(y)});
    if (pts.size() < 2) return s;
    Point c{0, 0};
    for (const Point& p : pts) c = c + p;
    c = c * (1.0 / pts.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (const Point& p : pts) {
        const Point d = p - c;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    const double angle = 0.5 * std::atan2(2 * sxy, sxx - syy);
    Point u{std::cos(angle), std::sin(angle)};
    if (dot(u, s.q - s.p) < 0) u = u * -1.0;
    double lo = dot(pts.front() - c, u), hi = lo;
    for (const Point& p : pts) {
        lo = std::min(lo, dot(p - c, u));
        hi = std::max(hi, dot(p - c, u));
    }
    return {s.id, c + u * lo, c + u * hi};
}

// Steps one pixel at a time past an endpoint while the skeleton continues
// within one pixel of the line; returns the last supported position.
inline Point walk(const BinaryImage& skeleton, Point from, Point u, int max_gap) {
    Point last = from;
    int misses = 0;
    for (int step = 1; misses <= max_gap; ++step) {
        const Point at = from + u * double(step);
        const int cx = static_cast<int>(std::lround(at.x)), cy = static_cast<int>(std::lround(at.y));
        bool hit = false;
        for (int dy = -1; dy <= 1 && !hit; ++dy)
            for (int dx = -1; dx <= 1 && !hit; ++dx)
                hit = skeleton.ink(cx + dx, cy + dy) &&
                      std::abs(cross(u, Point{double(cx + dx), double(cy + dy)} - at)) <= 1.0;
        if (hit) {
            last = at;
            misses = 0;
        } else {
            ++misses;
        }
    }
    return last;
}

} // namespace detail

// Hough pieces are refit to the skeleton before merging, since the angular
// quantisation tilts pieces of a shallow diagonal away from each other; the
// merged lines then walk their endpoints out to where the skeleton stops.
inline std::vector<Segment> detect_segments(const BinaryImage& skeleton,
                                            const HoughParams& hough = {},
                                            const MergeParams& merge = {}) {
    std::vector<Segment> raw;
    for (const auto& r : probabilistic_hough(skeleton, hough))
        raw.push_back(detail::refit(skeleton, {0, r.p, r.q}, merge.support));
    std::vector<Segment> out = merge_collinear(raw, merge);
    for (auto& s : out) {
        const double len = s.length();
        if (len == 0.0) continue;
        const Point u = (s.q - s.p) * (1.0 / len);
        s.q = detail::walk(skeleton, s.q, u, merge.walk_gap);
        s.p = detail::walk(skeleton, s.p, u * -1.0, merge.walk_gap);
    }
    // Pieces the Hough pass left apart may now overlap.
    return merge_collinear(out, merge);
}

// Pairwise intersections of the infinite lines, kept when the point lies
// within `tolerance` of both finite segments. Ordered by (a, b).
inline std::vector<Junction> compute_intersections(const std::vector<Segment>& segments,
                                                   double tolerance = 1.0) {
    std::vector<Junction> out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        for (std::size_t j = i + 1; j < segments.size(); ++j) {
            const Segment& s = segments[i];
            const Segment& t = segments[j];
            const auto x = line_intersection(s.p, s.q, t.p, t.q);
            if (!x) continue;
            if (point_segment_distance(*x, s.p, s.q) > tolerance) continue;
            if (point_segment_distance(*x, t.p, t.q) > tolerance) continue;
            Junction jn;
            jn.at = *x;
            jn.a = std::min(s.id, t.id);
            jn.b = std::max(s.id, t.id);
            out.push_back(jn);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Junction& l, const Junction& r) { return std::tie(l.a, l.b) < std::tie(r.a, r.b); });
    return out;
}

// A `kernel`-sided square centred on the rounded junction point. Each edge
// reports its maximal ink runs; corners belong to both adjoining edges and
// pixels off the image read as background.
inline Junction validate_intersection(const BinaryImage& image, const Junction& candidate,
                                      int kernel = 21) {
    if (kernel < 3 || kernel % 2 == 0) throw ParameterError("junction kernel must be odd and >= 3");
    Junction j = candidate;
    const int cx = static_cast<int>(std::lround(j.at.x));
    const int cy = static_cast<int>(std::lround(j.at.y));
    const int h = kernel / 2;
    j.crossings[kTop] = count_runs(image, cx - h, cy - h, cx + h, cy - h);
    j.crossings[kRight] = count_runs(image, cx + h, cy - h, cx + h, cy + h);
    j.crossings[kBottom] = count_runs(image, cx - h, cy + h, cx + h, cy + h);
    j.crossings[kLeft] = count_runs(image, cx - h, cy - h, cx - h, cy + h);
    j.arm_count = 0;
    for (int c : j.crossings) j.arm_count += c > 0;
    j.valid = j.arm_count >= 3;
    return j;
}

} // namespace pidgraph
