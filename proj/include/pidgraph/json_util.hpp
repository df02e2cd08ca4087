#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "pidgraph/error.hpp"
#include "pidgraph/geometry.hpp"

namespace pidgraph {

using Json = nlohmann::ordered_json;

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Parses JSON text, reporting syntax errors with a 1-based line/column.
inline Json parse_json(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw SchemaError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": malformed JSON");
    }
}

inline Json read_json_file(const std::string& path) { return parse_json(read_text_file(path), path); }

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

// Reals are rounded to a fixed number of decimals before serialization so
// repeated runs emit byte-identical documents.
inline double fixed(double v, int decimals = 3) {
    const double scale = std::pow(10.0, decimals);
    const double r = std::round(v * scale) / scale;
    return r == 0.0 ? 0.0 : r;
}

inline Json bbox_to_json(const BBox& b) { return Json::array({b.x0, b.y0, b.x1, b.y1}); }
inline Json point_to_json(Point p) { return Json::array({fixed(p.x), fixed(p.y)}); }

inline std::string record_prefix(const std::string& origin, int index) {
    return origin + ": record " + std::to_string(index);
}

inline BBox bbox_from_json(const Json& j, const std::string& origin, int index) {
    if (!j.is_array() || j.size() != 4) {
        throw SchemaError(record_prefix(origin, index) + ": field 'bbox' must be [x0,y0,x1,y1]",
                          index);
    }
    int v[4];
    for (int k = 0; k < 4; ++k) {
        if (!j[k].is_number()) {
            throw SchemaError(record_prefix(origin, index) + ": field 'bbox' must hold numbers",
                              index);
        }
        v[k] = static_cast<int>(std::lround(j[k].get<double>()));
    }
    BBox b{v[0], v[1], v[2], v[3]};
    if (!b.valid()) {
        throw SchemaError(record_prefix(origin, index) +
                              ": field 'bbox' has x1 < x0 or y1 < y0",
                          index);
    }
    return b;
}

inline Point point_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw SchemaError(what + ": expected [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

// Sheet width and height, when known.
using SheetBounds = std::optional<std::pair<int, int>>;

inline void check_in_bounds(const BBox& b, SheetBounds bounds,
                            const std::string& origin, int index) {
    if (!bounds) return;
    if (b.x0 < 0 || b.y0 < 0 || b.x1 >= bounds->first || b.y1 >= bounds->second) {
        throw SchemaError(record_prefix(origin, index) + ": bbox outside the " +
                              std::to_string(bounds->first) + "x" +
                              std::to_string(bounds->second) + " sheet",
                          index);
    }
}

} // namespace pidgraph
