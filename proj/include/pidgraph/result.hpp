#pragma once

#include <string>
#include <vector>

#include "pidgraph/codes.hpp"
#include "pidgraph/flow.hpp"
#include "pidgraph/json_util.hpp"
#include "pidgraph/lines.hpp"
#include "pidgraph/symbols.hpp"
#include "pidgraph/tags.hpp"

namespace pidgraph {

inline constexpr const char* kResultSchema = "pid-graph/1";

struct Report {
    std::vector<Unassociated> unassociated;
    std::vector<int> dropped_trees;
    std::vector<std::string> warnings;
};

// Every id is the record's index within its section.
struct Result {
    int width = 0;
    int height = 0;
    bool ground_truth = false;
    std::vector<PipelineCode> codes;
    std::vector<Tag> tags;
    std::vector<Segment> segments;
    std::vector<Junction> junctions;
    std::vector<SymbolDetection> symbols;
    std::vector<Association> associations;
    FlowForest forest;
    Report report;
};

inline ComponentKind parse_component_kind(const std::string& s, const std::string& where) {
    if (s == "tag") return ComponentKind::Tag;
    if (s == "code") return ComponentKind::Code;
    if (s == "symbol") return ComponentKind::Symbol;
    throw SchemaError(where + ": unknown component kind '" + s + "'");
}

inline NodeKind parse_node_kind(const std::string& s, const std::string& where) {
    if (s == "OUTLET") return NodeKind::OutletRoot;
    if (s == "LINE") return NodeKind::Line;
    if (s == "INLET") return NodeKind::InletLeaf;
    throw SchemaError(where + ": unknown node kind '" + s + "'");
}

inline Json node_to_json(const FlowNode& n) { return Json{{"kind", to_string(n.kind)}, {"ref", n.ref}}; }

inline Json result_to_json(const Result& r) {
    Json doc;
    doc["schema"] = kResultSchema;
    if (r.ground_truth) doc["ground_truth"] = true;
    doc["image"] = {{"width", r.width}, {"height", r.height}};

    Json codes = Json::array();
    for (std::size_t i = 0; i < r.codes.size(); ++i)
        codes.push_back({{"id", i}, {"text", r.codes[i].text}, {"bbox", bbox_to_json(r.codes[i].bbox)}});
    doc["codes"] = std::move(codes);

    Json tags = Json::array();
    for (std::size_t i = 0; i < r.tags.size(); ++i) {
        const Tag& t = r.tags[i];
        Json verts = Json::array();
        for (auto v : t.vertices) verts.push_back(point_to_json(v));
        tags.push_back({{"id", i},
                        {"vertices", std::move(verts)},
                        {"bbox", bbox_to_json(t.bbox)},
                        {"direction", t.direction ? Json(to_string(*t.direction)) : Json(nullptr)},
                        {"kind", t.kind ? Json(to_string(*t.kind)) : Json(nullptr)},
                        {"emerge", t.emerge ? point_to_json(*t.emerge) : Json(nullptr)}});
    }
    doc["tags"] = std::move(tags);

    Json segs = Json::array();
    for (const auto& s : r.segments)
        segs.push_back({{"id", s.id}, {"p", point_to_json(s.p)}, {"q", point_to_json(s.q)}});
    doc["segments"] = std::move(segs);

    Json juncs = Json::array();
    for (std::size_t i = 0; i < r.junctions.size(); ++i) {
        const Junction& j = r.junctions[i];
        juncs.push_back({{"id", i},
                         {"at", point_to_json(j.at)},
                         {"a", j.a},
                         {"b", j.b},
                         {"crossings", j.crossings},
                         {"arms", j.arm_count},
                         {"valid", j.valid}});
    }
    doc["junctions"] = std::move(juncs);

    Json syms = Json::array();
    for (std::size_t i = 0; i < r.symbols.size(); ++i) {
        const auto& s = r.symbols[i];
        syms.push_back({{"id", i},
                        {"class", std::string(label(s.cls))},
                        {"bbox", bbox_to_json(s.bbox)},
                        {"score", fixed(s.score)}});
    }
    doc["symbols"] = std::move(syms);

    Json assoc = Json::array();
    for (const auto& a : r.associations)
        assoc.push_back({{"kind", to_string(a.kind)},
                         {"component", a.component},
                         {"line", a.line},
                         {"distance", fixed(a.distance)}});
    doc["associations"] = std::move(assoc);

    Json trees = Json::array();
    for (const auto& t : r.forest.trees) {
        Json nodes = Json::array();
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            Json n = node_to_json(t.nodes[i]);
            n["parent"] = t.parent[i];
            nodes.push_back(std::move(n));
        }
        trees.push_back({{"outlet", t.outlet()}, {"nodes", std::move(nodes)}});
    }
    Json shared = Json::array();
    for (const auto& n : r.forest.shared_nodes()) shared.push_back(node_to_json(n));
    doc["forest"] = {{"trees", std::move(trees)}, {"shared", std::move(shared)}};

    Json un = Json::array();
    for (const auto& u : r.report.unassociated)
        un.push_back({{"kind", to_string(u.kind)}, {"component", u.component}});
    doc["report"] = {{"unassociated", std::move(un)},
                     {"dropped_trees", r.report.dropped_trees},
                     {"warnings", r.report.warnings}};
    return doc;
}

inline std::string serialize(const Result& r) { return result_to_json(r).dump(2) + "\n"; }

namespace detail {

// Typed member access with schema diagnostics.
struct Reader {
    std::string where;
    int record = -1; // outermost list index, -1 at document level

    const Json& member(const Json& j, const char* key) const {
        if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'", record);
        return j[key];
    }
    const Json& list(const Json& j, const char* key) const {
        const Json& v = member(j, key);
        if (!v.is_array()) throw SchemaError(where + ": field '" + key + "' must be a list", record);
        return v;
    }
    int integer(const Json& j, const char* key) const {
        const Json& v = member(j, key);
        if (!v.is_number_integer()) throw SchemaError(where + ": field '" + key + "' must be an integer", record);
        return v.get<int>();
    }
    double number(const Json& j, const char* key) const {
        const Json& v = member(j, key);
        if (!v.is_number()) throw SchemaError(where + ": field '" + key + "' must be a number", record);
        return v.get<double>();
    }
    std::string string(const Json& j, const char* key) const {
        const Json& v = member(j, key);
        if (!v.is_string()) throw SchemaError(where + ": field '" + key + "' must be a string", record);
        return v.get<std::string>();
    }
    bool boolean(const Json& j, const char* key) const {
        const Json& v = member(j, key);
        if (!v.is_boolean()) throw SchemaError(where + ": field '" + key + "' must be true or false", record);
        return v.get<bool>();
    }
    Reader at(const char* section, std::size_t index) const {
        return {where + ": " + section + "[" + std::to_string(index) + "]", record >= 0 ? record : static_cast<int>(index)};
    }
};

inline void check_id(const Reader& rd, const Json& rec, std::size_t index) {
    if (rd.integer(rec, "id") != static_cast<int>(index))
        throw SchemaError(rd.where + ": id must equal the record's position", static_cast<int>(index));
}

inline void check_ref(const Reader& rd, int ref, std::size_t size, const char* what) {
    if (ref < 0 || static_cast<std::size_t>(ref) >= size)
        throw SchemaError(rd.where + ": " + what + " " + std::to_string(ref) + " does not exist", rd.record);
}

} // namespace detail

// Parses and cross-checks a result document; every failure is a SchemaError.
inline Result result_from_json(const Json& doc, const std::string& origin) {
    using detail::Reader;
    const Reader rd{origin};
    if (!doc.is_object()) throw SchemaError(origin + ": expected a JSON object");
    if (rd.string(doc, "schema") != kResultSchema)
        throw SchemaError(origin + ": unsupported schema '" + rd.string(doc, "schema") + "'");
    Result r;
    r.ground_truth = doc.contains("ground_truth") && doc["ground_truth"].is_boolean() &&
                     doc["ground_truth"].get<bool>();
    const Json& image = rd.member(doc, "image");
    r.width = rd.integer(image, "width");
    r.height = rd.integer(image, "height");

    const Json& codes = rd.list(doc, "codes");
    for (std::size_t i = 0; i < codes.size(); ++i) {
        const Reader c = rd.at("codes", i);
        detail::check_id(c, codes[i], i);
        r.codes.push_back({c.string(codes[i], "text"), bbox_from_json(c.member(codes[i], "bbox"), c.where, int(i))});
    }

    const Json& tags = rd.list(doc, "tags");
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const Reader c = rd.at("tags", i);
        const Json& rec = tags[i];
        detail::check_id(c, rec, i);
        const Json& verts = c.list(rec, "vertices");
        if (verts.size() != 5) throw SchemaError(c.where + ": a tag needs exactly 5 vertices", int(i));
        Tag t;
        for (int k = 0; k < 5; ++k) t.vertices[k] = point_from_json(verts[k], c.where + ": vertex");
        if (!wide_enough(vertex_extent(t.vertices)))
            throw SchemaError(c.where + ": tag is not three times as wide as tall", int(i));
        t.bbox = bbox_from_json(c.member(rec, "bbox"), c.where, int(i));
        try {
            if (!c.member(rec, "direction").is_null()) t.direction = parse_direction(c.string(rec, "direction"));
            if (!c.member(rec, "kind").is_null()) t.kind = parse_tag_kind(c.string(rec, "kind"));
        } catch (const ParameterError& e) {
            throw SchemaError(c.where + ": " + e.what(), int(i));
        }
        if (!c.member(rec, "emerge").is_null()) t.emerge = point_from_json(rec["emerge"], c.where + ": emerge");
        r.tags.push_back(t);
    }

    const Json& segs = rd.list(doc, "segments");
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const Reader c = rd.at("segments", i);
        detail::check_id(c, segs[i], i);
        r.segments.push_back({int(i), point_from_json(c.member(segs[i], "p"), c.where + ": p"),
                              point_from_json(c.member(segs[i], "q"), c.where + ": q")});
    }

    const Json& juncs = rd.list(doc, "junctions");
    for (std::size_t i = 0; i < juncs.size(); ++i) {
        const Reader c = rd.at("junctions", i);
        const Json& rec = juncs[i];
        detail::check_id(c, rec, i);
        Junction j;
        j.at = point_from_json(c.member(rec, "at"), c.where + ": at");
        j.a = c.integer(rec, "a");
        j.b = c.integer(rec, "b");
        detail::check_ref(c, j.a, r.segments.size(), "segment");
        detail::check_ref(c, j.b, r.segments.size(), "segment");
        const Json& cr = c.list(rec, "crossings");
        if (cr.size() != 4) throw SchemaError(c.where + ": 'crossings' needs 4 counts", int(i));
        for (int k = 0; k < 4; ++k) {
            if (!cr[k].is_number_integer()) throw SchemaError(c.where + ": crossings must be integers", int(i));
            j.crossings[k] = cr[k].get<int>();
        }
        j.arm_count = c.integer(rec, "arms");
        j.valid = c.boolean(rec, "valid");
        r.junctions.push_back(j);
    }

    const Json& syms = rd.list(doc, "symbols");
    for (std::size_t i = 0; i < syms.size(); ++i) {
        const Reader c = rd.at("symbols", i);
        detail::check_id(c, syms[i], i);
        const auto cls = parse_symbol_class(c.string(syms[i], "class"));
        if (!cls) throw SchemaError(c.where + ": unknown symbol class '" + c.string(syms[i], "class") + "'", int(i));
        r.symbols.push_back({*cls, bbox_from_json(c.member(syms[i], "bbox"), c.where, int(i)),
                             c.number(syms[i], "score")});
    }

    auto section_size = [&](ComponentKind k) {
        return k == ComponentKind::Tag ? r.tags.size() : k == ComponentKind::Code ? r.codes.size() : r.symbols.size();
    };

    const Json& assoc = rd.list(doc, "associations");
    for (std::size_t i = 0; i < assoc.size(); ++i) {
        const Reader c = rd.at("associations", i);
        Association a;
        a.kind = parse_component_kind(c.string(assoc[i], "kind"), c.where);
        a.component = c.integer(assoc[i], "component");
        a.line = c.integer(assoc[i], "line");
        a.distance = c.number(assoc[i], "distance");
        detail::check_ref(c, a.component, section_size(a.kind), to_string(a.kind));
        detail::check_ref(c, a.line, r.segments.size(), "segment");
        if (a.distance < 0) throw SchemaError(c.where + ": negative distance", int(i));
        r.associations.push_back(a);
    }

    const Json& forest = rd.member(doc, "forest");
    const Json& trees = Reader{origin + ": forest"}.list(forest, "trees");
    for (std::size_t i = 0; i < trees.size(); ++i) {
        const Reader c = rd.at("forest.trees", i);
        const Json& nodes = c.list(trees[i], "nodes");
        if (nodes.empty()) throw SchemaError(c.where + ": tree without nodes", int(i));
        FlowTree t;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const Reader n = c.at("nodes", k);
            FlowNode node{parse_node_kind(n.string(nodes[k], "kind"), n.where), n.integer(nodes[k], "ref")};
            const int parent = n.integer(nodes[k], "parent");
            if ((k == 0) != (parent == -1) || parent >= static_cast<int>(k))
                throw SchemaError(n.where + ": parent must precede the node, and only the root has none", n.record);
            if (node.kind == NodeKind::Line) detail::check_ref(n, node.ref, r.segments.size(), "segment");
            else detail::check_ref(n, node.ref, r.tags.size(), "tag");
            t.nodes.push_back(node);
            t.parent.push_back(parent);
        }
        if (t.nodes[0].kind != NodeKind::OutletRoot || c.integer(trees[i], "outlet") != t.outlet())
            throw SchemaError(c.where + ": tree must be rooted at its outlet", int(i));
        r.forest.trees.push_back(std::move(t));
    }

    if (doc.contains("report")) {
        const Reader c{origin + ": report"};
        const Json& rep = doc["report"];
        const Json& un = c.list(rep, "unassociated");
        for (std::size_t i = 0; i < un.size(); ++i) {
            const Reader u = c.at("unassociated", i);
            Unassociated x{parse_component_kind(u.string(un[i], "kind"), u.where), u.integer(un[i], "component")};
            detail::check_ref(u, x.component, section_size(x.kind), to_string(x.kind));
            r.report.unassociated.push_back(x);
        }
        for (const auto& d : c.list(rep, "dropped_trees")) {
            if (!d.is_number_integer()) throw SchemaError(c.where + ": dropped_trees must hold integers");
            r.report.dropped_trees.push_back(d.get<int>());
        }
        for (const auto& w : c.list(rep, "warnings")) {
            if (!w.is_string()) throw SchemaError(c.where + ": warnings must be strings");
            r.report.warnings.push_back(w.get<std::string>());
        }
    }
    return r;
}

inline Result read_result(const std::string& path) { return result_from_json(read_json_file(path), path); }

} // namespace pidgraph
