#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pidgraph/codes.hpp"
#include "pidgraph/draw.hpp"
#include "pidgraph/error.hpp"
#include "pidgraph/flow.hpp"
#include "pidgraph/font.hpp"
#include "pidgraph/json_util.hpp"
#include "pidgraph/lines.hpp"
#include "pidgraph/result.hpp"
#include "pidgraph/symbols.hpp"
#include "pidgraph/tags.hpp"

namespace pidgraph {

inline constexpr const char* kSheetSpecSchema = "pid-sheet-spec/1";

enum class NoiseKind { None, Speckle, BreakGaps };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double probability = 0.002; // speckle: chance a pixel turns to ink
    int gap = 6;                // break-gaps: pixels removed per gap
    int count = 2;              // break-gaps: gaps per sheet
};

struct SymbolPlacement {
    SymbolClass cls = SymbolClass::Others;
    int count = 1;
};

struct SheetSpec {
    int width = 1400;
    int height = 1000;
    int outlets = 2;
    int inlets = 4;
    int junctions = 0; // dead-end stubs crossing a branch; pruning removes them
    int diagonal = 0;  // branches drawn at a slant
    bool mirror = true;
    std::vector<SymbolPlacement> symbols{{SymbolClass::BallValve, 1},
                                         {SymbolClass::GlobeValve, 1},
                                         {SymbolClass::CheckValve, 1},
                                         {SymbolClass::Insulation, 1}};
    std::string grammar{kDefaultCodePattern};
    NoiseSpec noise;

    int symbol_count() const {
        int n = 0;
        for (const auto& s : symbols) n += s.count;
        return n;
    }

    void validate() const {
        if (width < 600 || height < 300) throw ParameterError("sheet must be at least 600x300");
        if (outlets < 1 || inlets < outlets) throw ParameterError("sheet needs inlets >= outlets >= 1");
        if (junctions < 0 || diagonal < 0 || diagonal > inlets)
            throw ParameterError("junction and diagonal counts must be in range");
        for (const auto& s : symbols)
            if (s.count < 0) throw ParameterError("symbol counts must be >= 0");
        const CodeGrammar g(grammar);
        bool variable = false;
        for (std::size_t i = 0; i < g.length(); ++i) {
            variable |= g.token(i) != CodeGrammar::Token::Literal;
            if (g.token(i) == CodeGrammar::Token::Literal && !font::find(grammar[i]))
                throw ParameterError(std::string("grammar literal '") + grammar[i] + "' has no glyph");
        }
        if (!variable) throw ParameterError("grammar needs at least one digit or letter position");
        if (noise.probability < 0.0 || noise.probability > 1.0 || noise.gap < 1 || noise.count < 0)
            throw ParameterError("noise parameters out of range");
    }
};

inline const char* to_string(NoiseKind k) {
    switch (k) {
    case NoiseKind::None: return "none";
    case NoiseKind::Speckle: return "speckle";
    case NoiseKind::BreakGaps: return "break_gaps";
    }
    return "?";
}

inline Json spec_to_json(const SheetSpec& s) {
    Json syms = Json::array();
    for (const auto& p : s.symbols) syms.push_back({{"class", std::string(label(p.cls))}, {"count", p.count}});
    return {{"schema", kSheetSpecSchema},
            {"width", s.width},
            {"height", s.height},
            {"outlets", s.outlets},
            {"inlets", s.inlets},
            {"junctions", s.junctions},
            {"diagonal", s.diagonal},
            {"mirror", s.mirror},
            {"symbols", std::move(syms)},
            {"grammar", s.grammar},
            {"noise",
             {{"kind", to_string(s.noise.kind)},
              {"probability", s.noise.probability},
              {"gap", s.noise.gap},
              {"count", s.noise.count}}}};
}

// Missing keys keep their defaults; unknown keys and bad values are schema errors.
inline SheetSpec spec_from_json(const Json& doc, const std::string& origin) {
    if (!doc.is_object()) throw SchemaError(origin + ": spec must be a JSON object");
    static const char* keys[] = {"schema",   "width",  "height",  "outlets", "inlets", "junctions",
                                 "diagonal", "mirror", "symbols", "grammar", "noise"};
    for (const auto& [key, value] : doc.items())
        if (std::find(std::begin(keys), std::end(keys), key) == std::end(keys))
            throw SchemaError(origin + ": unknown key '" + key + "'");
    if (doc.contains("schema") && doc["schema"] != kSheetSpecSchema)
        throw SchemaError(origin + ": unsupported schema");
    SheetSpec s;
    auto integer = [&](const char* key, int& target) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_number_integer()) throw SchemaError(origin + ": '" + key + "' must be an integer");
        target = doc[key].get<int>();
    };
    integer("width", s.width);
    integer("height", s.height);
    integer("outlets", s.outlets);
    integer("inlets", s.inlets);
    integer("junctions", s.junctions);
    integer("diagonal", s.diagonal);
    if (doc.contains("mirror")) {
        if (!doc["mirror"].is_boolean()) throw SchemaError(origin + ": 'mirror' must be true or false");
        s.mirror = doc["mirror"].get<bool>();
    }
    if (doc.contains("grammar")) {
        if (!doc["grammar"].is_string()) throw SchemaError(origin + ": 'grammar' must be a string");
        s.grammar = doc["grammar"].get<std::string>();
    }
    if (doc.contains("symbols")) {
        if (!doc["symbols"].is_array()) throw SchemaError(origin + ": 'symbols' must be a list");
        s.symbols.clear();
        int i = 0;
        for (const auto& rec : doc["symbols"]) {
            if (!rec.is_object() || !rec.contains("class") || !rec["class"].is_string())
                throw SchemaError(record_prefix(origin + " symbols", i) + ": needs a 'class'", i);
            const auto cls = parse_symbol_class(rec["class"].get<std::string>());
            if (!cls) throw SchemaError(record_prefix(origin + " symbols", i) + ": unknown class", i);
            int count = 1;
            if (rec.contains("count")) {
                if (!rec["count"].is_number_integer())
                    throw SchemaError(record_prefix(origin + " symbols", i) + ": 'count' must be an integer", i);
                count = rec["count"].get<int>();
            }
            s.symbols.push_back({*cls, count});
            ++i;
        }
    }
    if (doc.contains("noise")) {
        const Json& n = doc["noise"];
        if (!n.is_object()) throw SchemaError(origin + ": 'noise' must be an object");
        if (n.contains("kind")) {
            const std::string k = n["kind"].is_string() ? n["kind"].get<std::string>() : "";
            if (k == "none") s.noise.kind = NoiseKind::None;
            else if (k == "speckle") s.noise.kind = NoiseKind::Speckle;
            else if (k == "break_gaps") s.noise.kind = NoiseKind::BreakGaps;
            else throw SchemaError(origin + ": noise kind must be none, speckle or break_gaps");
        }
        if (n.contains("probability")) {
            if (!n["probability"].is_number()) throw SchemaError(origin + ": noise probability must be a number");
            s.noise.probability = n["probability"].get<double>();
        }
        for (auto [key, target] : {std::pair{"gap", &s.noise.gap}, std::pair{"count", &s.noise.count}}) {
            if (!n.contains(key)) continue;
            if (!n[key].is_number_integer()) throw SchemaError(origin + ": noise " + key + " must be an integer");
            *target = n[key].get<int>();
        }
    }
    try {
        s.validate();
    } catch (const ParameterError& e) {
        throw SchemaError(origin + ": " + e.what());
    }
    return s;
}

struct Sheet {
    BinaryImage ink{1, 1};
    GrayImage image{1, 1};
    Result truth;
    std::vector<TextRegion> text; // every rendered string, transcribed
};

namespace synth {

inline constexpr int kTagW = 90;
inline constexpr int kTagH = 30;
inline constexpr int kApex = 20;
inline constexpr int kMargin = 40;
inline constexpr int kTitle = 80;
inline constexpr int kCodeScale = 2;
inline constexpr int kCodeGap = 6; // code box bottom to the line's upper pixel row
inline constexpr int kOverhang = 25;
inline constexpr int kStubHalf = 40;
inline constexpr int kSlot = 60;
inline constexpr int kJunctionSep = 40;
inline constexpr double kThickness = 2.0;
// Centreline distance from an outline vertex to the outer edge of its stroke.
inline constexpr double kFlatExit = kThickness / 2.0;
inline constexpr double kApexExit = kFlatExit * 5.0 / 3.0; // 1 / sin(atan(15 / 20))

// Unbiased enough for layout and independent of the standard library.
class Rng {
public:
    explicit Rng(std::uint32_t seed) : eng_(seed) {}
    int uniform(int lo, int hi) { return lo + static_cast<int>(eng_() % static_cast<std::uint32_t>(hi - lo + 1)); }
    bool coin() { return (eng_() >> 31) != 0; }
    bool chance(double p) { return eng_() < p * 4294967296.0; }

private:
    std::mt19937 eng_;
};

inline std::string random_code(const CodeGrammar& g, Rng& rng) {
    std::string s;
    for (std::size_t i = 0; i < g.length(); ++i) {
        switch (g.token(i)) {
        case CodeGrammar::Token::Digit: s += static_cast<char>('0' + rng.uniform(0, 9)); break;
        case CodeGrammar::Token::Alpha: s += static_cast<char>('A' + rng.uniform(0, 25)); break;
        case CodeGrammar::Token::Literal: s += g.pattern()[i]; break;
        }
    }
    return s;
}

// A valid code with one variable position switched to the wrong class.
inline std::string near_miss(const CodeGrammar& g, Rng& rng) {
    std::string s = random_code(g, rng);
    std::vector<std::size_t> variable;
    for (std::size_t i = 0; i < g.length(); ++i)
        if (g.token(i) != CodeGrammar::Token::Literal) variable.push_back(i);
    const std::size_t i = variable[rng.uniform(0, static_cast<int>(variable.size()) - 1)];
    s[i] = g.token(i) == CodeGrammar::Token::Digit ? static_cast<char>('A' + rng.uniform(0, 25))
                                                   : static_cast<char>('0' + rng.uniform(0, 9));
    return s;
}

// Pentagon outline: rectangle body with a triangular point on the right,
// vertices on pixel centres so the 2-px stroke is symmetric.
inline std::array<Point, 5> pentagon_right(int x0, int y0) {
    const double l = x0 + 0.5, t = y0 + 0.5;
    return {Point{l, t}, {l + kTagW - kApex, t}, {l + kTagW, t + kTagH / 2.0}, {l + kTagW - kApex, t + kTagH},
            {l, t + kTagH}};
}

struct Text {
    std::string text;
    int x, y, scale;
    BBox box() const { return font::text_box(x, y, text, scale); }
};

struct PlannedTag {
    std::array<Point, 5> vertices;
    BBox bbox;
    TagKind kind;
    bool apex_right;
    int line; // logical segment index
};

struct PlannedSymbol {
    SymbolClass cls;
    BBox bbox;
    int line;
};

struct PlannedCode {
    Text text;
    int line;
};

struct Layout {
    std::vector<Segment> segments; // logical index in id
    std::vector<Segment> strokes;  // as drawn, parallel to segments
    std::vector<PlannedTag> tags;
    std::vector<PlannedCode> codes;
    std::vector<PlannedSymbol> symbols;
    std::vector<Text> distractors;
};

struct Band {
    int top = 0, height = 0, branches = 0;
    std::vector<bool> diagonal;
};

// Mirrors about the vertical centre line of a sheet `w` pixels wide.
struct Mirror {
    int w;
    bool on;
    Point operator()(Point p) const { return on ? Point{w - p.x, p.y} : p; }
    BBox operator()(const BBox& b) const { return on ? BBox{w - 1 - b.x1, b.y0, w - 1 - b.x0, b.y1} : b; }
};

inline int code_width(const SheetSpec& spec) {
    return font::text_box(0, 0, spec.grammar, kCodeScale).width();
}

// Lays out one band: outlet tag, main line to a vertical collector, and one
// branch per inlet. Returns false when a random draw violates separation.
inline bool plan_band(const SheetSpec& spec, const Band& band, int band_index, Rng& rng, Layout& out,
                      std::vector<std::pair<int, int>>& slots, const CodeGrammar& grammar) {
    const int w = spec.width;
    const int cw = code_width(spec);
    const int k = band.branches;
    const double spacing = (band.height - 60.0) / k;
    const int min_sep = spec.junctions > 0 ? 2 * kStubHalf + 30 : kTagH + 40;
    const int jitter = std::max(0, std::min(10, static_cast<int>(spacing - min_sep) / 2));

    std::vector<int> cy(k), jy(k);
    for (int j = 0; j < k; ++j) {
        cy[j] = band.top + 30 + static_cast<int>(std::lround((j + 0.5) * spacing)) + rng.uniform(-jitter, jitter);
        jy[j] = band.diagonal[j] ? cy[j] + (rng.coin() ? 1 : -1) * rng.uniform(20, 35) : cy[j];
    }
    const int hy = rng.uniform(band.top + 30, band.top + band.height - 30);
    std::vector<int> on_v = jy;
    on_v.push_back(hy);
    std::sort(on_v.begin(), on_v.end());
    for (std::size_t i = 1; i < on_v.size(); ++i)
        if (on_v[i] - on_v[i - 1] < kJunctionSep) return false;
    if (on_v.front() < band.top + 30 || on_v.back() > band.top + band.height - 30) return false;

    const int apex_x = kMargin + kTagW;
    const int vx_lo = apex_x + 15 + cw + 55;
    const int vx = rng.uniform(vx_lo, vx_lo + 150);
    const int inlet_x0 = w - kMargin - kTagW;
    const Mirror m{w, spec.mirror && rng.coin()};
    // Strokes are drawn vertex to vertex; the recorded segment starts where
    // the centreline leaves the tag's ink, `trim_p`/`trim_q` pixels inward.
    auto seg = [&](Point p, Point q, double trim_p = 0.0, double trim_q = 0.0) {
        const int id = static_cast<int>(out.segments.size());
        out.strokes.push_back({id, m(p), m(q)});
        const Point dir = (q - p) * (1.0 / distance(p, q));
        out.segments.push_back({id, m(p + dir * trim_p), m(q - dir * trim_q)});
        return id;
    };
    auto tag = [&](int x0, int y0, TagKind kind, int line) {
        std::array<Point, 5> v = pentagon_right(x0, y0);
        for (auto& p : v) p = m(p);
        out.tags.push_back({v, m(BBox{x0, y0, x0 + kTagW, y0 + kTagH}), kind, !m.on, line});
        const std::string name = (kind == TagKind::Outlet ? "OUT " : "IN ") +
                                 std::to_string(kind == TagKind::Outlet ? band_index + 1 : out.tags.size());
        const BBox body = m(BBox{x0 + 8, y0 + kTagH / 2 - 3, x0 + 8 + font::text_box(0, 0, name, 1).width() - 1,
                                 y0 + kTagH / 2 + 3});
        out.distractors.push_back({name, body.x0, body.y0, 1});
    };
    auto code = [&](int x0, int y_bottom, int line) {
        const std::string text = random_code(grammar, rng);
        const BBox b = m(BBox{x0, y_bottom - 7 * kCodeScale + 1, x0 + cw - 1, y_bottom});
        out.codes.push_back({{text, b.x0, b.y0, kCodeScale}, line});
    };

    const double half = 0.5;
    const int main = seg({apex_x + half, hy + half}, {vx + half, hy + half}, kApexExit);
    seg({vx + half, on_v.front() - kOverhang + half}, {vx + half, on_v.back() + kOverhang + half});
    tag(kMargin, hy - kTagH / 2, TagKind::Outlet, main);
    code(apex_x + 15, hy - kCodeGap, main);

    for (int j = 0; j < k; ++j) {
        const Point end{inlet_x0 + half, cy[j] + half};
        const Point start{vx + half, jy[j] + half};
        const int branch = seg(start, end, 0.0, kFlatExit * distance(start, end) / (end.x - start.x));
        tag(inlet_x0, cy[j] - kTagH / 2, TagKind::Inlet, branch);
        const int cx0 = vx + 30;
        auto line_y = [&](double x) { return jy[j] + (cy[j] - jy[j]) * (x - vx) / double(inlet_x0 - vx); };
        const double top = std::min(line_y(cx0), line_y(cx0 + cw));
        code(cx0, static_cast<int>(std::floor(top)) - kCodeGap, branch);
        if (band.diagonal[j]) continue;
        for (int sx = cx0 + cw + 30 + kSlot / 2; sx + kSlot / 2 <= inlet_x0 - 40; sx += kSlot)
            slots.push_back({branch, m.on ? w - 1 - sx : sx});
    }
    return true;
}

} // namespace synth

// Builds the ground truth first, then renders it. Identical (spec, seed)
// pairs give identical sheets.
inline Sheet generate_sheet(const SheetSpec& spec, std::uint32_t seed) {
    using namespace synth;
    spec.validate();
    const CodeGrammar grammar(spec.grammar);
    const int w = spec.width, h = spec.height;
    if (w - 2 * kMargin - 2 * kTagW < code_width(spec) * 2 + 300)
        throw GenerationError("sheet too narrow for the code grammar");
    const int area_top = 20, area_bottom = h - kTitle - 20;
    const int band_h = (area_bottom - area_top) / spec.outlets;
    const int most = (spec.inlets + spec.outlets - 1) / spec.outlets;
    const int min_sep = spec.junctions > 0 ? 2 * kStubHalf + 30 : kTagH + 40;
    if ((band_h - 60.0) / most < min_sep) throw GenerationError("bands too crowded for the requested inlets");

    Rng rng(seed);
    std::vector<Band> bands(spec.outlets);
    std::vector<std::pair<int, int>> all_branches;
    for (int b = 0; b < spec.outlets; ++b) {
        bands[b].top = area_top + b * band_h;
        bands[b].height = band_h;
        bands[b].branches = spec.inlets / spec.outlets + (b < spec.inlets % spec.outlets ? 1 : 0);
        bands[b].diagonal.assign(bands[b].branches, false);
        for (int j = 0; j < bands[b].branches; ++j) all_branches.push_back({b, j});
    }
    for (int i = 0; i < spec.diagonal; ++i) {
        const int pick = rng.uniform(i, static_cast<int>(all_branches.size()) - 1);
        std::swap(all_branches[i], all_branches[pick]);
        bands[all_branches[i].first].diagonal[all_branches[i].second] = true;
    }

    Layout layout;
    std::vector<std::pair<int, int>> slots; // (logical line, x centre)
    for (int b = 0; b < spec.outlets; ++b) {
        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
            Layout trial = layout;
            auto trial_slots = slots;
            if (plan_band(spec, bands[b], b, rng, trial, trial_slots, grammar)) {
                layout = std::move(trial);
                slots = std::move(trial_slots);
                placed = true;
            }
        }
        if (!placed) throw GenerationError("could not separate the junctions of band " + std::to_string(b));
    }

    // Symbols and stubs take distinct random slots along straight branches.
    const int needed = spec.symbol_count() + spec.junctions;
    if (needed > static_cast<int>(slots.size()))
        throw GenerationError("not enough room on branch lines for symbols and stubs");
    for (int i = 0; i < needed; ++i) std::swap(slots[i], slots[rng.uniform(i, static_cast<int>(slots.size()) - 1)]);
    int next = 0;
    auto line_row = [&](int line) { return static_cast<int>(std::floor(layout.segments[line].p.y)); };
    for (const auto& p : spec.symbols)
        for (int c = 0; c < p.count; ++c, ++next) {
            const auto [line, sx] = slots[next];
            const int y = line_row(line);
            layout.symbols.push_back({p.cls, {sx - 16, y - 11, sx + 15, y + 12}, line});
        }
    for (int s = 0; s < spec.junctions; ++s, ++next) {
        const auto [line, sx] = slots[next];
        const double y = layout.segments[line].p.y;
        const int id = static_cast<int>(layout.segments.size());
        layout.segments.push_back({id, {sx + 0.5, y - kStubHalf}, {sx + 0.5, y + kStubHalf}});
        layout.strokes.push_back(layout.segments.back());
    }

    // Title block: sheet captions and one near-miss code.
    {
        const std::vector<std::string> captions = {"DRAWING NO 4471-A", "SHEET " + std::to_string(seed % 9 + 1) + " OF 9",
                                                   "REV B", near_miss(grammar, rng)};
        int x = kMargin, y = h - kTitle + 16;
        for (const auto& c : captions) {
            const int cw = font::text_box(0, 0, c, kCodeScale).width();
            if (x + cw > w - kMargin) {
                x = kMargin;
                y += 30;
            }
            if (y + 7 * kCodeScale > h - 4) break;
            layout.distractors.push_back({c, x, y, kCodeScale});
            x += cw + 40;
        }
    }

    // Stable ids in the order the line detector assigns them.
    std::vector<Segment> segs = layout.segments;
    for (auto& s : segs) detail::normalize(s);
    std::vector<int> order(segs.size());
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int i) {
        const Segment& s = segs[i];
        return std::make_tuple(std::min(s.p.y, s.q.y), std::min(s.p.x, s.q.x), std::max(s.p.y, s.q.y),
                               std::max(s.p.x, s.q.x));
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
    std::vector<int> id_of(segs.size());
    Sheet sheet;
    Result& truth = sheet.truth;
    truth.width = w;
    truth.height = h;
    truth.ground_truth = true;
    for (std::size_t k = 0; k < order.size(); ++k) {
        id_of[order[k]] = static_cast<int>(k);
        Segment s = segs[order[k]];
        s.id = static_cast<int>(k);
        truth.segments.push_back(s);
    }

    // Render.
    BinaryImage ink(w, h);
    for (const auto& s : layout.strokes) draw_segment(ink, s.p, s.q, kThickness);
    for (const auto& t : layout.tags) draw_polygon(ink, t.vertices, kThickness);
    for (const auto& c : layout.codes) font::draw_text(ink, c.text.x, c.text.y, c.text.text, c.text.scale);
    for (const auto& d : layout.distractors) font::draw_text(ink, d.x, d.y, d.text, d.scale);
    const auto library = builtin_templates();
    for (const auto& s : layout.symbols) {
        const BinaryImage& mask = library[static_cast<int>(s.cls)].mask;
        for (int y = 0; y < mask.height(); ++y)
            for (int x = 0; x < mask.width(); ++x)
                if (mask.at(x, y) && ink.in_bounds(s.bbox.x0 + x, s.bbox.y0 + y)) ink.set(s.bbox.x0 + x, s.bbox.y0 + y, true);
    }
    if (spec.noise.kind == NoiseKind::Speckle) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (rng.chance(spec.noise.probability)) ink.set(x, y, true);
    } else if (spec.noise.kind == NoiseKind::BreakGaps) {
        for (int g = 0; g < spec.noise.count; ++g) {
            const Segment& s = truth.segments[rng.uniform(0, static_cast<int>(truth.segments.size()) - 1)];
            const double len = s.length();
            if (len <= spec.noise.gap) continue;
            const double from = rng.uniform(0, static_cast<int>(len) - spec.noise.gap);
            const Point dir = (s.q - s.p) * (1.0 / len);
            const Point a = s.p + dir * from, b = s.p + dir * (from + spec.noise.gap);
            BinaryImage cut(w, h);
            draw_segment(cut, a, b, kThickness + 1.0);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    if (cut.at(x, y)) ink.set(x, y, false);
        }
    }

    // Ground-truth records.
    for (const auto& c : layout.codes) truth.codes.push_back({c.text.text, c.text.box()});
    for (const auto& t : layout.tags) {
        Tag tag;
        tag.vertices = t.vertices;
        tag.bbox = t.bbox;
        tag.direction = t.apex_right ? Direction::Right : Direction::Left;
        tag.kind = t.kind;
        const bool attach_right = (t.kind == TagKind::Outlet) == t.apex_right;
        tag.emerge = Point{double(attach_right ? t.bbox.x1 : t.bbox.x0), (t.bbox.y0 + t.bbox.y1) / 2.0};
        truth.tags.push_back(tag);
    }
    for (const auto& s : layout.symbols) truth.symbols.push_back({s.cls, s.bbox, 1.0});

    for (const auto& cand : compute_intersections(truth.segments, 1.0))
        truth.junctions.push_back(validate_intersection(ink, cand));

    auto seg_of = [&](int logical) -> const Segment& { return truth.segments[id_of[logical]]; };
    for (std::size_t i = 0; i < layout.tags.size(); ++i) {
        const Segment& s = seg_of(layout.tags[i].line);
        truth.associations.push_back(
            {ComponentKind::Tag, int(i), s.id, point_segment_distance(*truth.tags[i].emerge, s.p, s.q)});
    }
    for (std::size_t i = 0; i < layout.codes.size(); ++i) {
        const Segment& s = seg_of(layout.codes[i].line);
        const BBox& b = truth.codes[i].bbox;
        double d = std::numeric_limits<double>::infinity();
        for (Point c : {Point{double(b.x0), double(b.y0)}, Point{double(b.x1), double(b.y0)},
                        Point{double(b.x1), double(b.y1)}, Point{double(b.x0), double(b.y1)}})
            d = std::min(d, point_segment_distance(c, s.p, s.q));
        truth.associations.push_back({ComponentKind::Code, int(i), s.id, d});
    }
    for (std::size_t i = 0; i < layout.symbols.size(); ++i) {
        const Segment& s = seg_of(layout.symbols[i].line);
        truth.associations.push_back(
            {ComponentKind::Symbol, int(i), s.id, point_segment_distance(truth.symbols[i].bbox.center(), s.p, s.q)});
    }

    ForestReport fr;
    truth.forest = prune_forest(build_forest(truth.tags, truth.associations, truth.junctions, &fr), &fr);
    truth.report.dropped_trees = fr.dropped_trees;
    truth.report.warnings = fr.warnings;

    for (const auto& c : layout.codes) sheet.text.push_back({c.text.box(), c.text.text, 1.0});
    for (const auto& d : layout.distractors) sheet.text.push_back({d.box(), d.text, 1.0});
    std::sort(sheet.text.begin(), sheet.text.end(), [](const TextRegion& a, const TextRegion& b) {
        return std::tie(a.bbox.y0, a.bbox.x0) < std::tie(b.bbox.y0, b.bbox.x0);
    });
    sheet.image = render(ink);
    sheet.ink = std::move(ink);
    return sheet;
}

} // namespace pidgraph
