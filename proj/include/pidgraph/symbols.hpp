#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "pidgraph/draw.hpp"
#include "pidgraph/error.hpp"
#include "pidgraph/geometry.hpp"
#include "pidgraph/image.hpp"
#include "pidgraph/json_util.hpp"

namespace pidgraph {

enum class SymbolClass {
    BallValve,
    CheckValve,
    ChemicalSeal,
    CircleValve,
    Concentric,
    FloodConnection,
    GateValveClosed,
    GlobeValve,
    Insulation,
    GlobeValveClosed,
    Others,
};

inline constexpr std::array<std::string_view, 11> kSymbolLabels = {
    "Bl-V", "Ck-V", "Ch-sl", "Cr-V", "Con", "F-Con", "Gt-V-nc", "Gb-V", "Ins", "Gb-V-nc", "Others",
};

inline constexpr int kSymbolClassCount = static_cast<int>(kSymbolLabels.size());

inline std::string_view label(SymbolClass c) { return kSymbolLabels[static_cast<int>(c)]; }

inline std::optional<SymbolClass> parse_symbol_class(std::string_view s) {
    for (int i = 0; i < kSymbolClassCount; ++i)
        if (kSymbolLabels[i] == s) return static_cast<SymbolClass>(i);
    return std::nullopt;
}

struct SymbolDetection {
    SymbolClass cls = SymbolClass::Others;
    BBox bbox;
    double score = 1.0;
};

struct SymbolTemplate {
    SymbolClass cls = SymbolClass::Others;
    BinaryImage mask{1, 1};
    std::vector<int> rotations{0}; // degrees, multiples of 90
};

// Quarter-turn rotation clockwise on screen, `quarters` in 0..3.
inline BinaryImage rotate_quarters(const BinaryImage& img, int quarters) {
    quarters = ((quarters % 4) + 4) % 4;
    if (quarters == 0) return img;
    const int w = img.width(), h = img.height();
    const bool swap = quarters % 2 == 1;
    BinaryImage out(swap ? h : w, swap ? w : h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!img.at(x, y)) continue;
            if (quarters == 1) out.set(h - 1 - y, x, true);
            else if (quarters == 2) out.set(w - 1 - x, h - 1 - y, true);
            else out.set(y, w - 1 - x, true);
        }
    return out;
}

namespace detail {

constexpr int kTemplateW = 32;
constexpr int kTemplateH = 24;

inline void bowtie(BinaryImage& m, bool filled) {
    const std::array<Point, 3> left = {Point{4.5, 3.5}, {15.5, 11.5}, {4.5, 19.5}};
    const std::array<Point, 3> right = {Point{26.5, 3.5}, {15.5, 11.5}, {26.5, 19.5}};
    if (!filled) {
        draw_polygon(m, left, 2.0);
        draw_polygon(m, right, 2.0);
        return;
    }
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            const double dy = std::abs(y - 11.5);
            const double reach = (x <= 15 ? 15.5 - x : x - 15.5);
            if ((x >= 4 && x <= 27) && dy <= reach * 8.0 / 11.0 + 0.5) m.set(x, y, true);
        }
}

inline void disc(BinaryImage& m, Point c, double r, bool filled) {
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            const double d = distance({double(x), double(y)}, c);
            if (filled ? d <= r : std::abs(d - r) <= 1.0) m.set(x, y, true);
        }
}

} // namespace detail

// Procedural masks for the eleven classes. Every mask carries the 2-px pipe
// running through its middle rows, since symbols are matched in place on
// their line.
inline std::vector<SymbolTemplate> builtin_templates() {
    using detail::kTemplateH;
    using detail::kTemplateW;
    std::vector<SymbolTemplate> lib;
    for (int i = 0; i < kSymbolClassCount; ++i) {
        BinaryImage m(kTemplateW, kTemplateH);
        const Point c{15.5, 11.5};
        std::vector<int> rotations{0, 90, 180, 270};
        switch (static_cast<SymbolClass>(i)) {
        case SymbolClass::BallValve:
            detail::bowtie(m, false);
            detail::disc(m, c, 5.0, true);
            break;
        case SymbolClass::CheckValve: {
            const std::array<Point, 3> tri = {Point{6.5, 3.5}, {25.5, 11.5}, {6.5, 19.5}};
            draw_polygon(m, tri, 2.0);
            fill_box(m, {25, 2, 26, 21});
            break;
        }
        case SymbolClass::ChemicalSeal:
            draw_polygon(m, std::array<Point, 4>{Point{8.5, 4.5}, {22.5, 4.5}, {22.5, 18.5}, {8.5, 18.5}}, 2.0);
            draw_segment(m, {8.5, 4.5}, {22.5, 18.5}, 2.0);
            draw_segment(m, {22.5, 4.5}, {8.5, 18.5}, 2.0);
            break;
        case SymbolClass::CircleValve:
            for (int y = 12; y < kTemplateH; ++y)
                for (int x = 0; x < kTemplateW; ++x) {
                    const double dy = y - 11.5;
                    const double reach = std::abs(x - 15.5);
                    if (x >= 4 && x <= 27 && dy <= reach * 8.0 / 11.0 + 0.5) m.set(x, y, true);
                }
            detail::bowtie(m, false);
            fill_box(m, {15, 3, 16, 11});
            fill_box(m, {9, 1, 22, 3});
            break;
        case SymbolClass::Concentric:
            draw_polygon(m, std::array<Point, 4>{Point{5.5, 2.5}, {26.5, 7.5}, {26.5, 15.5}, {5.5, 20.5}}, 2.0);
            break;
        case SymbolClass::FloodConnection:
            fill_box(m, {11, 1, 13, 22});
            fill_box(m, {18, 1, 20, 22});
            break;
        case SymbolClass::GateValveClosed:
            detail::bowtie(m, true);
            break;
        case SymbolClass::GlobeValve:
            detail::bowtie(m, false);
            fill_box(m, {1, 3, 2, 20});
            fill_box(m, {29, 3, 30, 20});
            break;
        case SymbolClass::Insulation:
            detail::disc(m, c, 10.0, false);
            break;
        case SymbolClass::GlobeValveClosed:
            detail::disc(m, c, 7.0, true);
            fill_box(m, {4, 5, 5, 18});
            fill_box(m, {26, 5, 27, 18});
            break;
        case SymbolClass::Others:
            draw_polygon(m, std::array<Point, 4>{Point{15.5, 1.5}, {27.5, 11.5}, {15.5, 21.5}, {3.5, 11.5}}, 2.0);
            fill_box(m, {13, 9, 18, 14});
            break;
        }
        fill_box(m, {0, 11, kTemplateW - 1, 12});
        lib.push_back({static_cast<SymbolClass>(i), std::move(m), std::move(rotations)});
    }
    return lib;
}

// |A and B| / |A or B| with B placed at (x, y); pixels off the image are
// background.
inline double jaccard_at(const BinaryImage& image, const BinaryImage& mask, int x, int y) {
    long long inter = 0, a = 0, b = 0;
    for (int j = 0; j < mask.height(); ++j)
        for (int i = 0; i < mask.width(); ++i) {
            const bool m = mask.at(i, j);
            const bool v = image.ink(x + i, y + j);
            a += m;
            b += v;
            inter += m && v;
        }
    const long long uni = a + b - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

namespace detail {

struct Integral {
    int w, h;
    std::vector<long long> sum; // (w+1) x (h+1)

    explicit Integral(const BinaryImage& img)
        : w(img.width()), h(img.height()),
          sum(static_cast<std::size_t>(w + 1) * (h + 1), 0) {
        for (int y = 0; y < h; ++y) {
            long long row = 0;
            for (int x = 0; x < w; ++x) {
                row += img.at(x, y);
                at(x + 1, y + 1) = at(x + 1, y) + row;
            }
        }
    }
    long long& at(int x, int y) { return sum[static_cast<std::size_t>(y) * (w + 1) + x]; }
    long long at(int x, int y) const { return sum[static_cast<std::size_t>(y) * (w + 1) + x]; }
    long long box(int x0, int y0, int x1, int y1) const {
        return at(x1 + 1, y1 + 1) - at(x0, y1 + 1) - at(x1 + 1, y0) + at(x0, y0);
    }
};

struct Variant {
    SymbolClass cls;
    BinaryImage mask;
    std::vector<std::pair<int, int>> ink;
};

inline std::vector<Variant> expand_rotations(const std::vector<SymbolTemplate>& library) {
    std::vector<Variant> out;
    for (const auto& t : library) {
        if (t.mask.empty()) throw ParameterError("symbol template mask is empty");
        std::vector<BinaryImage> seen;
        for (int deg : t.rotations) {
            if (deg % 90 != 0) throw ParameterError("template rotation must be a multiple of 90");
            BinaryImage m = rotate_quarters(t.mask, deg / 90);
            if (std::find(seen.begin(), seen.end(), m) != seen.end()) continue;
            seen.push_back(m);
            Variant v{t.cls, m, {}};
            for (int y = 0; y < m.height(); ++y)
                for (int x = 0; x < m.width(); ++x)
                    if (m.at(x, y)) v.ink.emplace_back(x, y);
            out.push_back(std::move(v));
        }
    }
    return out;
}

} // namespace detail

// Same-class boxes overlapping above `overlap` keep only the best score;
// ties resolve toward the top-left box.
inline std::vector<SymbolDetection> suppress_overlaps(std::vector<SymbolDetection> hits,
                                                      double overlap = 0.3) {
    std::sort(hits.begin(), hits.end(), [](const SymbolDetection& a, const SymbolDetection& b) {
        if (a.score != b.score) return a.score > b.score;
        return std::tie(a.bbox.y0, a.bbox.x0, a.cls) < std::tie(b.bbox.y0, b.bbox.x0, b.cls);
    });
    std::vector<SymbolDetection> kept;
    for (const auto& h : hits) {
        bool clash = false;
        for (const auto& k : kept)
            if (k.cls == h.cls && iou(k.bbox, h.bbox) > overlap) {
                clash = true;
                break;
            }
        if (!clash) kept.push_back(h);
    }
    std::sort(kept.begin(), kept.end(), [](const SymbolDetection& a, const SymbolDetection& b) {
        return std::tie(a.bbox.y0, a.bbox.x0, a.cls) < std::tie(b.bbox.y0, b.bbox.x0, b.cls);
    });
    return kept;
}

// Sliding-window Jaccard score against every template rotation. Windows
// whose ink count cannot reach `threshold` are skipped via the integral image.
inline std::vector<SymbolDetection> match_templates(const BinaryImage& image,
                                                    const std::vector<SymbolTemplate>& library,
                                                    double threshold = 0.8,
                                                    double overlap = 0.3) {
    if (library.empty()) throw ParameterError("template library is empty");
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ParameterError("threshold must be in (0,1]");
    const auto variants = detail::expand_rotations(library);
    const detail::Integral integral(image);
    std::vector<SymbolDetection> hits;
    for (const auto& v : variants) {
        const int tw = v.mask.width(), th = v.mask.height();
        if (tw > image.width() || th > image.height()) continue;
        const double a = static_cast<double>(v.ink.size());
        const long long lo = static_cast<long long>(std::ceil(threshold * a - 1e-9));
        const long long hi = static_cast<long long>(std::floor(a / threshold + 1e-9));
        for (int y = 0; y + th <= image.height(); ++y) {
            for (int x = 0; x + tw <= image.width(); ++x) {
                const long long b = integral.box(x, y, x + tw - 1, y + th - 1);
                if (b < lo || b > hi) continue;
                long long inter = 0;
                for (auto [i, j] : v.ink) inter += image.at(x + i, y + j);
                const double score = static_cast<double>(inter) / (a + b - inter);
                if (score >= threshold) hits.push_back({v.cls, {x, y, x + tw - 1, y + th - 1}, score});
            }
        }
    }
    return suppress_overlaps(std::move(hits), overlap);
}

inline std::vector<SymbolDetection> parse_symbol_detections(const Json& doc, const std::string& origin,
                                                            SheetBounds bounds = std::nullopt) {
    const Json* list = &doc;
    if (doc.is_object()) {
        if (!doc.contains("symbols")) throw SchemaError(origin + ": missing 'symbols' list");
        list = &doc["symbols"];
    }
    if (!list->is_array()) throw SchemaError(origin + ": expected a list of symbol detections");
    std::vector<SymbolDetection> out;
    int index = 0;
    for (const auto& rec : *list) {
        const std::string where = record_prefix(origin, index);
        if (!rec.is_object()) throw SchemaError(where + ": expected an object", index);
        if (!rec.contains("class") || !rec["class"].is_string()) {
            throw SchemaError(where + ": field 'class' must be a label string", index);
        }
        const auto cls = parse_symbol_class(rec["class"].get<std::string>());
        if (!cls) {
            throw SchemaError(where + ": unknown symbol class '" + rec["class"].get<std::string>() + "'",
                              index);
        }
        if (!rec.contains("bbox")) throw SchemaError(where + ": missing field 'bbox'", index);
        SymbolDetection d;
        d.cls = *cls;
        d.bbox = bbox_from_json(rec["bbox"], origin, index);
        check_in_bounds(d.bbox, bounds, origin, index);
        if (rec.contains("score") && !rec["score"].is_null()) {
            const auto& s = rec["score"];
            if (!s.is_number() || s.get<double>() < 0.0 || s.get<double>() > 1.0) {
                throw SchemaError(where + ": field 'score' must be in [0,1]", index);
            }
            d.score = s.get<double>();
        }
        out.push_back(d);
        ++index;
    }
    return out;
}

inline std::vector<SymbolDetection> ingest_symbol_detections(const std::string& path,
                                                             SheetBounds bounds = std::nullopt) {
    return parse_symbol_detections(read_json_file(path), path, bounds);
}

inline Json symbol_detections_to_json(const std::vector<SymbolDetection>& dets) {
    Json list = Json::array();
    for (const auto& d : dets) {
        Json j;
        j["class"] = std::string(label(d.cls));
        j["bbox"] = bbox_to_json(d.bbox);
        j["score"] = fixed(d.score);
        list.push_back(std::move(j));
    }
    return list;
}

} // namespace pidgraph
