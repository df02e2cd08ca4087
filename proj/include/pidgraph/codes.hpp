#pragma once

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "pidgraph/error.hpp"
#include "pidgraph/geometry.hpp"
#include "pidgraph/json_util.hpp"
#include "pidgraph/raster.hpp"

namespace pidgraph {

struct TextRegion {
    BBox bbox;
    std::optional<std::string> text;
    std::optional<double> confidence;
};

struct PipelineCode {
    std::string text;
    BBox bbox;
};

inline constexpr std::string_view kDefaultCodePattern = "N\"-AANNNNNNN-NNNNNA-AA";

// Positional token pattern. 'N' is a digit, 'A' a letter of either case,
// anything else must appear literally.
class CodeGrammar {
public:
    enum class Token : char { Digit, Alpha, Literal };

    CodeGrammar() : CodeGrammar(std::string(kDefaultCodePattern)) {}

    explicit CodeGrammar(std::string pattern) : pattern_(std::move(pattern)) {
        if (pattern_.empty()) throw ParameterError("code grammar is empty");
        for (char c : pattern_) {
            const auto u = static_cast<unsigned char>(c);
            if (u < 0x20 || u > 0x7e) {
                throw ParameterError("code grammar literal is not printable ASCII");
            }
        }
    }

    const std::string& pattern() const noexcept { return pattern_; }
    std::size_t length() const noexcept { return pattern_.size(); }

    Token token(std::size_t i) const {
        if (pattern_[i] == 'N') return Token::Digit;
        if (pattern_[i] == 'A') return Token::Alpha;
        return Token::Literal;
    }

    bool accepts(std::size_t i, char c) const {
        const auto u = static_cast<unsigned char>(c);
        switch (token(i)) {
        case Token::Digit: return c >= '0' && c <= '9';
        case Token::Alpha: return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
        case Token::Literal: return u == static_cast<unsigned char>(pattern_[i]);
        }
        return false;
    }

private:
    std::string pattern_;
};

inline std::string_view trim(std::string_view s) {
    auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && space(s.front())) s.remove_prefix(1);
    while (!s.empty() && space(s.back())) s.remove_suffix(1);
    return s;
}

inline bool validate_code(std::string_view text, const CodeGrammar& grammar) {
    const auto t = trim(text);
    if (t.size() != grammar.length()) return false;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (!grammar.accepts(i, t[i])) return false;
    return true;
}

// Regions whose transcription validates, in input order, with the trimmed
// text. Indices of regions without a transcription go to `untranscribed`.
inline std::vector<PipelineCode> filter_codes(const std::vector<TextRegion>& regions,
                                              const CodeGrammar& grammar,
                                              std::vector<int>* untranscribed = nullptr) {
    std::vector<PipelineCode> out;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const auto& r = regions[i];
        if (!r.text) {
            if (untranscribed) untranscribed->push_back(static_cast<int>(i));
            continue;
        }
        if (validate_code(*r.text, grammar)) out.push_back({std::string(trim(*r.text)), r.bbox});
    }
    return out;
}

struct BlobParams {
    long long min_area = 15;
    long long max_area = 2000;
    int max_height = 40;
    int merge_gap = 10;
};

// Glyph-scale components (height and width within max_height, ink within
// max_area) are chained left to right when their vertical extents overlap
// and the horizontal gap is at most merge_gap. A group survives when its
// total ink reaches min_area, so punctuation joins its word.
inline std::vector<TextRegion> detect_text_blobs(const BinaryImage& image,
                                                 const BlobParams& params = {}) {
    std::vector<Component> glyphs;
    for (const auto& c : connected_components(image)) {
        if (c.bbox.height() > params.max_height || c.bbox.width() > params.max_height) continue;
        if (c.pixel_count > params.max_area) continue;
        glyphs.push_back(c);
    }
    const std::size_t n = glyphs.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return glyphs[a].bbox.x0 < glyphs[b].bbox.x0; });
    for (std::size_t i = 0; i < n; ++i) {
        const BBox& a = glyphs[order[i]].bbox;
        for (std::size_t j = i + 1; j < n; ++j) {
            const BBox& b = glyphs[order[j]].bbox;
            if (b.x0 - a.x1 - 1 > params.merge_gap) break;
            const bool overlap = b.y0 <= a.y1 && a.y0 <= b.y1;
            if (overlap) parent[find(order[i])] = find(order[j]);
        }
    }

    struct Group {
        BBox box;
        long long ink = 0;
        bool used = false;
    };
    std::vector<Group> groups(n);
    for (std::size_t i = 0; i < n; ++i) {
        Group& g = groups[find(i)];
        g.box = g.used ? unite(g.box, glyphs[i].bbox) : glyphs[i].bbox;
        g.ink += glyphs[i].pixel_count;
        g.used = true;
    }
    std::vector<TextRegion> out;
    for (const auto& g : groups)
        if (g.used && g.ink >= params.min_area) out.push_back({g.box, std::nullopt, std::nullopt});
    std::sort(out.begin(), out.end(), [](const TextRegion& a, const TextRegion& b) {
        return std::tie(a.bbox.y0, a.bbox.x0) < std::tie(b.bbox.y0, b.bbox.x0);
    });
    return out;
}

// Accepts a bare list of records or an object whose "regions" member holds it.
inline std::vector<TextRegion> parse_text_regions(const Json& doc, const std::string& origin,
                                                  SheetBounds bounds = std::nullopt) {
    const Json* list = &doc;
    if (doc.is_object()) {
        if (!doc.contains("regions")) throw SchemaError(origin + ": missing 'regions' list");
        list = &doc["regions"];
    }
    if (!list->is_array()) throw SchemaError(origin + ": expected a list of text regions");
    std::vector<TextRegion> out;
    int index = 0;
    for (const auto& rec : *list) {
        if (!rec.is_object()) {
            throw SchemaError(record_prefix(origin, index) + ": expected an object", index);
        }
        if (!rec.contains("bbox")) {
            throw SchemaError(record_prefix(origin, index) + ": missing field 'bbox'", index);
        }
        TextRegion r;
        r.bbox = bbox_from_json(rec["bbox"], origin, index);
        check_in_bounds(r.bbox, bounds, origin, index);
        if (rec.contains("text") && !rec["text"].is_null()) {
            if (!rec["text"].is_string()) {
                throw SchemaError(record_prefix(origin, index) + ": field 'text' must be a string",
                                  index);
            }
            r.text = rec["text"].get<std::string>();
        }
        if (rec.contains("confidence") && !rec["confidence"].is_null()) {
            const auto& c = rec["confidence"];
            if (!c.is_number() || c.get<double>() < 0.0 || c.get<double>() > 1.0) {
                throw SchemaError(
                    record_prefix(origin, index) + ": field 'confidence' must be in [0,1]", index);
            }
            r.confidence = c.get<double>();
        }
        out.push_back(std::move(r));
        ++index;
    }
    return out;
}

inline std::vector<TextRegion> ingest_text_regions(const std::string& path,
                                                   SheetBounds bounds = std::nullopt) {
    return parse_text_regions(read_json_file(path), path, bounds);
}

inline Json text_regions_to_json(const std::vector<TextRegion>& regions) {
    Json list = Json::array();
    for (const auto& r : regions) {
        Json j;
        j["bbox"] = bbox_to_json(r.bbox);
        j["text"] = r.text ? Json(*r.text) : Json(nullptr);
        j["confidence"] = r.confidence ? Json(fixed(*r.confidence)) : Json(nullptr);
        list.push_back(std::move(j));
    }
    return list;
}

} // namespace pidgraph
