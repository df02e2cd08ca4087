#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "pidgraph/error.hpp"
#include "pidgraph/flow.hpp"
#include "pidgraph/json_util.hpp"
#include "pidgraph/result.hpp"
#include "pidgraph/symbols.hpp"

namespace pidgraph {

// Percentage in tenths of a point, rounded half up, from exact integers.
inline long long percent_tenths(long long successful, long long total) {
    if (total <= 0) throw ParameterError("percentage of an empty total");
    return (2 * successful * 1000 + total) / (2 * total);
}

inline std::string format_tenths(long long tenths) {
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

inline std::string format_percent(long long successful, long long total) {
    return format_tenths(percent_tenths(successful, total));
}

struct Ratio {
    long long successful = 0;
    long long total = 0;

    double value() const { return total ? static_cast<double>(successful) / total : 0.0; }
    // "n/a" when nothing was there to find.
    std::string percent() const { return total ? format_percent(successful, total) : "n/a"; }
};

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline ClassScores class_scores(long long diag, long long row_sum, long long col_sum) {
    ClassScores s;
    s.precision = col_sum ? static_cast<double>(diag) / col_sum : 0.0;
    s.recall = row_sum ? static_cast<double>(diag) / row_sum : 0.0;
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

// Rows are actual classes, columns predicted.
template <std::size_t N>
struct ConfusionMatrix {
    std::array<std::array<long long, N>, N> cells{};

    long long row_sum(std::size_t c) const {
        long long s = 0;
        for (auto v : cells[c]) s += v;
        return s;
    }
    long long col_sum(std::size_t c) const {
        long long s = 0;
        for (const auto& row : cells) s += row[c];
        return s;
    }
    ClassScores scores(std::size_t c) const { return class_scores(cells[c][c], row_sum(c), col_sum(c)); }
    bool diagonal() const {
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                if (i != j && cells[i][j]) return false;
        return true;
    }
};

using SymbolConfusion = ConfusionMatrix<kSymbolClassCount>;

struct DetectionScore {
    long long matched = 0;
    long long truth = 0;
    long long predicted = 0;

    double precision() const { return predicted ? static_cast<double>(matched) / predicted : (truth ? 0.0 : 1.0); }
    double recall() const { return truth ? static_cast<double>(matched) / truth : 1.0; }
};

struct Matching {
    std::vector<int> truth_to_pred;
    std::vector<int> pred_to_truth;
    long long matched() const {
        return std::count_if(truth_to_pred.begin(), truth_to_pred.end(), [](int p) { return p >= 0; });
    }
};

// One-to-one greedy assignment, best score first; ties go to the lower
// (truth, prediction) index pair. `score` returns nullopt for ineligible pairs.
template <class Score>
Matching greedy_match(std::size_t truth, std::size_t pred, Score score) {
    std::vector<std::tuple<double, int, int>> cand;
    for (std::size_t g = 0; g < truth; ++g)
        for (std::size_t p = 0; p < pred; ++p)
            if (auto s = score(g, p)) cand.emplace_back(-*s, int(g), int(p));
    std::sort(cand.begin(), cand.end());
    Matching m{std::vector<int>(truth, -1), std::vector<int>(pred, -1)};
    for (auto [neg, g, p] : cand) {
        if (m.truth_to_pred[g] >= 0 || m.pred_to_truth[p] >= 0) continue;
        m.truth_to_pred[g] = p;
        m.pred_to_truth[p] = g;
    }
    return m;
}

inline double endpoint_error(const Segment& a, const Segment& b) {
    return std::min(std::max(distance(a.p, b.p), distance(a.q, b.q)), std::max(distance(a.p, b.q), distance(a.q, b.p)));
}

struct EvalOptions {
    double iou = 0.5;
    double endpoint_tolerance = 3.0;
};

struct Evaluation {
    std::vector<std::pair<std::string, Ratio>> rows;
    DetectionScore codes, segments, outlets, inlets, tags, symbols;
    SymbolConfusion confusion;
    bool forest_equal = false;
};

namespace detail {

inline Matching match_tags(const Result& pred, const Result& truth, double iou_min,
                           std::optional<TagKind> only = std::nullopt) {
    return greedy_match(truth.tags.size(), pred.tags.size(), [&](std::size_t g, std::size_t p) -> std::optional<double> {
        const Tag &t = truth.tags[g], &q = pred.tags[p];
        if (!q.kind || q.kind != t.kind) return std::nullopt;
        if (only && t.kind != only) return std::nullopt;
        const double v = iou(t.bbox, q.bbox);
        return v >= iou_min ? std::optional<double>(v) : std::nullopt;
    });
}

inline std::map<std::pair<ComponentKind, int>, int> line_of(const Result& r) {
    std::map<std::pair<ComponentKind, int>, int> out;
    for (const auto& a : r.associations) out[{a.kind, a.component}] = a.line;
    return out;
}

// Parent-child pairs of every tree, keyed by outlet.
using Edges = std::set<std::pair<FlowNode, FlowNode>>;

inline std::map<int, Edges> tree_edges(const FlowForest& f) {
    std::map<int, Edges> out;
    for (const auto& t : f.trees) {
        Edges& e = out[t.outlet()];
        for (std::size_t i = 1; i < t.nodes.size(); ++i) e.insert({t.nodes[t.parent[i]], t.nodes[i]});
    }
    return out;
}

} // namespace detail

// Truth forests map onto predicted ids through the tag and segment matchings;
// equal means identical edge sets for every outlet and no extra trees.
inline bool forests_equal(const Result& pred, const Result& truth, const Matching& tags, const Matching& segs) {
    const auto truth_edges = detail::tree_edges(truth.forest);
    const auto pred_edges = detail::tree_edges(pred.forest);
    if (truth_edges.size() != pred_edges.size()) return false;
    auto map_node = [&](const FlowNode& n) -> std::optional<FlowNode> {
        const auto& m = n.kind == NodeKind::Line ? segs.truth_to_pred : tags.truth_to_pred;
        if (n.ref < 0 || n.ref >= static_cast<int>(m.size()) || m[n.ref] < 0) return std::nullopt;
        return FlowNode{n.kind, m[n.ref]};
    };
    for (const auto& [outlet, edges] : truth_edges) {
        const int p = outlet < static_cast<int>(tags.truth_to_pred.size()) ? tags.truth_to_pred[outlet] : -1;
        const auto it = pred_edges.find(p);
        if (p < 0 || it == pred_edges.end()) return false;
        detail::Edges mapped;
        for (const auto& [a, b] : edges) {
            const auto ma = map_node(a), mb = map_node(b);
            if (!ma || !mb) return false;
            mapped.insert({*ma, *mb});
        }
        if (mapped != it->second) return false;
    }
    return true;
}

inline Evaluation evaluate(const Result& pred, const Result& truth, const EvalOptions& opt = {}) {
    if (pred.width != truth.width || pred.height != truth.height)
        throw SchemaError("prediction and ground truth describe sheets of different sizes");
    Evaluation ev;

    const Matching codes = greedy_match(truth.codes.size(), pred.codes.size(),
                                        [&](std::size_t g, std::size_t p) -> std::optional<double> {
                                            if (truth.codes[g].text != pred.codes[p].text) return std::nullopt;
                                            const double v = iou(truth.codes[g].bbox, pred.codes[p].bbox);
                                            return v >= opt.iou ? std::optional<double>(v) : std::nullopt;
                                        });
    const Matching segs = greedy_match(truth.segments.size(), pred.segments.size(),
                                       [&](std::size_t g, std::size_t p) -> std::optional<double> {
                                           const double e = endpoint_error(truth.segments[g], pred.segments[p]);
                                           return e <= opt.endpoint_tolerance ? std::optional<double>(-e) : std::nullopt;
                                       });
    const Matching tags = detail::match_tags(pred, truth, opt.iou);
    const Matching syms = greedy_match(truth.symbols.size(), pred.symbols.size(),
                                       [&](std::size_t g, std::size_t p) -> std::optional<double> {
                                           const double v = iou(truth.symbols[g].bbox, pred.symbols[p].bbox);
                                           return v >= opt.iou ? std::optional<double>(v) : std::nullopt;
                                       });

    ev.codes = {codes.matched(), (long long)truth.codes.size(), (long long)pred.codes.size()};
    ev.segments = {segs.matched(), (long long)truth.segments.size(), (long long)pred.segments.size()};
    ev.tags = {tags.matched(), (long long)truth.tags.size(), (long long)pred.tags.size()};
    for (auto kind : {TagKind::Outlet, TagKind::Inlet}) {
        DetectionScore& d = kind == TagKind::Outlet ? ev.outlets : ev.inlets;
        for (std::size_t g = 0; g < truth.tags.size(); ++g)
            if (truth.tags[g].kind == kind) {
                ++d.truth;
                d.matched += tags.truth_to_pred[g] >= 0;
            }
        for (const auto& t : pred.tags) d.predicted += t.kind == kind;
    }
    for (std::size_t g = 0; g < truth.symbols.size(); ++g) {
        const int p = syms.truth_to_pred[g];
        if (p < 0) continue;
        ++ev.confusion.cells[int(truth.symbols[g].cls)][int(pred.symbols[p].cls)];
        ev.symbols.matched += truth.symbols[g].cls == pred.symbols[p].cls;
    }
    ev.symbols.truth = truth.symbols.size();
    ev.symbols.predicted = pred.symbols.size();

    // An association holds when the matched component sits on the matched line.
    const auto pred_line = detail::line_of(pred);
    auto assoc_ratio = [&](ComponentKind kind, std::optional<TagKind> tag_kind) {
        Ratio r;
        const Matching& comp = kind == ComponentKind::Code ? codes : kind == ComponentKind::Tag ? tags : syms;
        for (const auto& a : truth.associations) {
            if (a.kind != kind) continue;
            if (tag_kind && truth.tags[a.component].kind != tag_kind) continue;
            ++r.total;
            const int p = comp.truth_to_pred[a.component];
            if (p < 0) continue;
            const auto it = pred_line.find({kind, p});
            r.successful += it != pred_line.end() && segs.truth_to_pred[a.line] == it->second;
        }
        return r;
    };

    ev.rows = {{"Pipeline-Code Detection", {ev.codes.matched, ev.codes.truth}},
               {"Pipeline Detection", {ev.segments.matched, ev.segments.truth}},
               {"Outlet Detection", {ev.outlets.matched, ev.outlets.truth}},
               {"Inlet Detection", {ev.inlets.matched, ev.inlets.truth}},
               {"Pipeline Code Association", assoc_ratio(ComponentKind::Code, std::nullopt)},
               {"Outlet Association", assoc_ratio(ComponentKind::Tag, TagKind::Outlet)},
               {"Inlet Association", assoc_ratio(ComponentKind::Tag, TagKind::Inlet)},
               {"Symbol Detection", {ev.symbols.matched, ev.symbols.truth}},
               {"Symbol Association", assoc_ratio(ComponentKind::Symbol, std::nullopt)}};
    ev.forest_equal = forests_equal(pred, truth, tags, segs);
    return ev;
}

inline Json evaluation_to_json(const Evaluation& ev) {
    Json rows = Json::array();
    for (const auto& [name, r] : ev.rows)
        rows.push_back({{"component", name},
                        {"successful", r.successful},
                        {"total", r.total},
                        {"accuracy", r.percent()},
                        {"ratio", r.value()}});
    auto det = [](const DetectionScore& d) {
        return Json{{"matched", d.matched},
                    {"truth", d.truth},
                    {"predicted", d.predicted},
                    {"precision", d.precision()},
                    {"recall", d.recall()}};
    };
    Json labels = Json::array(), matrix = Json::array(), classes = Json::array();
    for (int c = 0; c < kSymbolClassCount; ++c) {
        labels.push_back(std::string(kSymbolLabels[c]));
        matrix.push_back(ev.confusion.cells[c]);
        const ClassScores s = ev.confusion.scores(c);
        classes.push_back({{"label", std::string(kSymbolLabels[c])},
                           {"precision", s.precision},
                           {"recall", s.recall},
                           {"f1", s.f1}});
    }
    return {{"schema", "pid-graph-eval/1"},
            {"rows", std::move(rows)},
            {"detection",
             {{"codes", det(ev.codes)},
              {"segments", det(ev.segments)},
              {"tags", det(ev.tags)},
              {"outlets", det(ev.outlets)},
              {"inlets", det(ev.inlets)},
              {"symbols", det(ev.symbols)}}},
            {"confusion", {{"labels", std::move(labels)}, {"matrix", std::move(matrix)}}},
            {"classes", std::move(classes)},
            {"forest_equal", ev.forest_equal}};
}

inline std::string evaluation_table(const Evaluation& ev) {
    std::string out = "Component                    Successful  Accuracy\n";
    for (const auto& [name, r] : ev.rows) {
        char line[128];
        std::snprintf(line, sizeof line, "%-28s %5lld/%-5lld %7s%s\n", name.c_str(), r.successful, r.total,
                      r.percent().c_str(), r.total ? "%" : "");
        out += line;
    }
    out += std::string("Forest equal: ") + (ev.forest_equal ? "yes" : "no") + "\n";
    return out;
}

} // namespace pidgraph
