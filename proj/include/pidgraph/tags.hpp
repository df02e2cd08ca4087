#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pidgraph/error.hpp"
#include "pidgraph/geometry.hpp"
#include "pidgraph/polyline.hpp"
#include "pidgraph/raster.hpp"

namespace pidgraph {

enum class Direction { Left, Right };
enum class TagKind { Inlet, Outlet };

inline const char* to_string(Direction d) { return d == Direction::Left ? "LEFT" : "RIGHT"; }
inline const char* to_string(TagKind k) { return k == TagKind::Inlet ? "INLET" : "OUTLET"; }

inline Direction parse_direction(const std::string& s) {
    if (s == "LEFT") return Direction::Left;
    if (s == "RIGHT") return Direction::Right;
    throw ParameterError("unknown direction '" + s + "'");
}

inline TagKind parse_tag_kind(const std::string& s) {
    if (s == "INLET") return TagKind::Inlet;
    if (s == "OUTLET") return TagKind::Outlet;
    throw ParameterError("unknown tag kind '" + s + "'");
}

struct Extent {
    double x0, y0, x1, y1;
};

inline Extent vertex_extent(const std::array<Point, 5>& v) {
    Extent e{v[0].x, v[0].y, v[0].x, v[0].y};
    for (auto p : v) {
        e.x0 = std::min(e.x0, p.x);
        e.x1 = std::max(e.x1, p.x);
        e.y0 = std::min(e.y0, p.y);
        e.y1 = std::max(e.y1, p.y);
    }
    return e;
}

// Pixels nearest to the extreme vertex coordinates.
inline BBox vertex_bbox(const std::array<Point, 5>& v) {
    const Extent e = vertex_extent(v);
    return {static_cast<int>(std::lround(e.x0)), static_cast<int>(std::lround(e.y0)),
            static_cast<int>(std::lround(e.x1)), static_cast<int>(std::lround(e.y1))};
}

// Width and height are coordinate spans, so an outline with vertices on
// x0..x0+90 and y0..y0+30 is exactly three times as wide as tall.
inline bool wide_enough(const Extent& e, double ratio = 3.0) {
    return e.y1 > e.y0 && e.x1 - e.x0 >= ratio * (e.y1 - e.y0);
}

inline bool wide_enough(const BBox& b, double ratio = 3.0) {
    return wide_enough(Extent{double(b.x0), double(b.y0), double(b.x1), double(b.y1)}, ratio);
}

struct Tag {
    std::array<Point, 5> vertices{};
    BBox bbox;
    std::optional<Direction> direction;
    std::optional<TagKind> kind;
    std::optional<Point> emerge;

    // Shape invariants hold for every Tag built here.
    static Tag from_vertices(const std::array<Point, 5>& v, double ratio = 3.0) {
        Tag t;
        t.vertices = v;
        t.bbox = vertex_bbox(v);
        if (!wide_enough(vertex_extent(v), ratio)) {
            throw ParameterError("tag outline is not at least three times as wide as tall");
        }
        return t;
    }
};

inline bool attaches_right(const Tag& t) { return t.emerge && t.emerge->x >= t.bbox.x1; }

struct TagParams {
    double epsilon_fraction = 0.02; // of contour perimeter
    std::optional<double> epsilon;  // absolute override
    double min_aspect = 3.0;
    int min_height = 8;
};

// Tags are outlined pentagons whose strokes join the pipelines, so the
// enclosed background (not the ink component) carries the clean outline.
inline std::vector<Tag> detect_tags(const BinaryImage& image, const TagParams& params = {}) {
    std::vector<Tag> out;
    const BinaryImage holes = hole_mask(image);
    for (const auto& contour : extract_contours(holes)) {
        if (contour.points.size() < 5) continue;
        const double eps = params.epsilon ? *params.epsilon
                                          : params.epsilon_fraction * contour.perimeter();
        if (!(eps > 0.0)) continue;
        const Polyline simple = simplify_rdp(contour, eps);
        if (simple.points.size() != 5) continue;
        std::array<Point, 5> v;
        std::copy(simple.points.begin(), simple.points.end(), v.begin());
        const Extent e = vertex_extent(v);
        if (e.y1 - e.y0 + 1 < params.min_height || !wide_enough(e, params.min_aspect)) continue;
        out.push_back(Tag::from_vertices(v, params.min_aspect));
    }
    return out;
}

// Vertices are split by the vertical midline of their bbox; the side holding
// three is the pointing direction. Vertices within 1 px of the midline go to
// whichever side currently holds fewer.
inline Direction orient_tag(const std::array<Point, 5>& v) {
    double lo = v[0].x, hi = v[0].x;
    for (auto p : v) {
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
    }
    const double mid = (lo + hi) / 2.0;
    int left = 0, right = 0, ties = 0;
    for (auto p : v) {
        if (std::abs(p.x - mid) < 1.0) ++ties;
        else if (p.x < mid) ++left;
        else ++right;
    }
    for (int i = 0; i < ties; ++i) {
        if (left == right) throw OrientationError("tag midline split is symmetric");
        (left < right ? left : right) += 1;
    }
    if (left == 3 && right == 2) return Direction::Left;
    if (left == 2 && right == 3) return Direction::Right;
    throw OrientationError("tag vertices split " + std::to_string(left) + "/" +
                           std::to_string(right) + " about the midline");
}

struct KindMapping {
    TagKind apex_side = TagKind::Outlet;
    TagKind flat_side = TagKind::Inlet;
};

// Strokes crossing the outer edge of a square probe of side `kernel`
// placed against one vertical side of the bbox.
inline int probe_crossings(const BinaryImage& image, const BBox& box, bool right_side, int kernel) {
    const int x = right_side ? box.x1 + kernel : box.x0 - kernel;
    const int cy = (box.y0 + box.y1) / 2;
    const int half = kernel / 2;
    return count_runs(image, x, cy - half, x, cy + half);
}

inline Tag classify_tag(const BinaryImage& image, const Tag& candidate, int kernel = 21,
                        const KindMapping& mapping = {}) {
    if (kernel < 1) throw ParameterError("probe kernel must be positive");
    Tag tag = candidate;
    if (!tag.direction) tag.direction = orient_tag(tag.vertices);
    const int left = probe_crossings(image, tag.bbox, false, kernel);
    const int right = probe_crossings(image, tag.bbox, true, kernel);
    if ((left == 1) == (right == 1)) {
        throw ClassificationError("tag at (" + std::to_string(tag.bbox.x0) + "," +
                                  std::to_string(tag.bbox.y0) + ") has " + std::to_string(left) +
                                  " left and " + std::to_string(right) + " right crossings");
    }
    const bool attach_right = right == 1;
    const bool apex_right = *tag.direction == Direction::Right;
    tag.kind = attach_right == apex_right ? mapping.apex_side : mapping.flat_side;
    const double cy = (tag.bbox.y0 + tag.bbox.y1) / 2.0;
    tag.emerge = Point{double(attach_right ? tag.bbox.x1 : tag.bbox.x0), cy};
    return tag;
}

} // namespace pidgraph
