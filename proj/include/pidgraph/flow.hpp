#pragma once

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pidgraph/codes.hpp"
#include "pidgraph/error.hpp"
#include "pidgraph/geometry.hpp"
#include "pidgraph/lines.hpp"
#include "pidgraph/symbols.hpp"
#include "pidgraph/tags.hpp"

namespace pidgraph {

enum class ComponentKind { Tag, Code, Symbol };

inline const char* to_string(ComponentKind k) {
    switch (k) {
    case ComponentKind::Tag: return "tag";
    case ComponentKind::Code: return "code";
    case ComponentKind::Symbol: return "symbol";
    }
    return "?";
}

struct Association {
    ComponentKind kind = ComponentKind::Tag;
    int component = 0; // index into the component's section
    int line = 0;      // Segment id
    double distance = 0.0;
};

struct Unassociated {
    ComponentKind kind = ComponentKind::Tag;
    int component = 0;
};

struct AssociationResult {
    std::vector<Association> links;
    std::vector<Unassociated> unassociated;
};

struct AssociationParams {
    double tag_max_dist = 30.0;
    double code_max_dist = 30.0;
    double symbol_max_gap = 20.0;
};

namespace detail {

// Nearest admissible segment; equal distances resolve to the smaller id.
template <class Dist, class Admit>
std::optional<std::pair<int, double>> nearest_segment(const std::vector<Segment>& segments, Dist dist,
                                                      Admit admit) {
    std::optional<std::pair<int, double>> best;
    for (const auto& s : segments) {
        if (!admit(s)) continue;
        const double d = dist(s);
        if (!best || d < best->second || (d == best->second && s.id < best->first)) best = {{s.id, d}};
    }
    return best;
}

} // namespace detail

// Each classified tag goes to the nearest segment (from its emerge point)
// that reaches into the half-plane on its attachment side.
inline AssociationResult associate_tags(const std::vector<Tag>& tags, const std::vector<Segment>& segments,
                                        double max_dist = 30.0) {
    AssociationResult out;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const Tag& t = tags[i];
        const int id = static_cast<int>(i);
        if (!t.emerge) {
            out.unassociated.push_back({ComponentKind::Tag, id});
            continue;
        }
        const Point e = *t.emerge;
        const bool right = attaches_right(t);
        auto best = detail::nearest_segment(
            segments, [&](const Segment& s) { return point_segment_distance(e, s.p, s.q); },
            [&](const Segment& s) {
                return right ? std::max(s.p.x, s.q.x) >= e.x - 1.0 : std::min(s.p.x, s.q.x) <= e.x + 1.0;
            });
        if (best && best->second <= max_dist) out.links.push_back({ComponentKind::Tag, id, best->first, best->second});
        else out.unassociated.push_back({ComponentKind::Tag, id});
    }
    return out;
}

// Distance from the closest of the four bbox corners.
inline AssociationResult associate_codes(const std::vector<PipelineCode>& codes,
                                         const std::vector<Segment>& segments, double max_dist = 30.0) {
    AssociationResult out;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        const BBox& b = codes[i].bbox;
        const Point corners[4] = {{double(b.x0), double(b.y0)},
                                  {double(b.x1), double(b.y0)},
                                  {double(b.x1), double(b.y1)},
                                  {double(b.x0), double(b.y1)}};
        auto best = detail::nearest_segment(
            segments,
            [&](const Segment& s) {
                double d = std::numeric_limits<double>::infinity();
                for (auto c : corners) d = std::min(d, point_segment_distance(c, s.p, s.q));
                return d;
            },
            [](const Segment&) { return true; });
        const int id = static_cast<int>(i);
        if (best && best->second <= max_dist) out.links.push_back({ComponentKind::Code, id, best->first, best->second});
        else out.unassociated.push_back({ComponentKind::Code, id});
    }
    return out;
}

// Nearest segment to the bbox center, kept only if it passes within
// `max_gap` of the box itself.
inline AssociationResult associate_symbols(const std::vector<SymbolDetection>& symbols,
                                           const std::vector<Segment>& segments, double max_gap = 20.0) {
    AssociationResult out;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const BBox& b = symbols[i].bbox;
        const Point c = b.center();
        auto best = detail::nearest_segment(
            segments, [&](const Segment& s) { return point_segment_distance(c, s.p, s.q); },
            [](const Segment&) { return true; });
        const int id = static_cast<int>(i);
        const Segment* seg = nullptr;
        if (best)
            for (const auto& s : segments)
                if (s.id == best->first) seg = &s;
        if (seg && segment_box_distance(seg->p, seg->q, b) <= max_gap) {
            out.links.push_back({ComponentKind::Symbol, id, best->first, best->second});
        } else {
            out.unassociated.push_back({ComponentKind::Symbol, id});
        }
    }
    return out;
}

enum class NodeKind { OutletRoot, Line, InletLeaf };

inline const char* to_string(NodeKind k) {
    switch (k) {
    case NodeKind::OutletRoot: return "OUTLET";
    case NodeKind::Line: return "LINE";
    case NodeKind::InletLeaf: return "INLET";
    }
    return "?";
}

struct FlowNode {
    NodeKind kind = NodeKind::Line;
    int ref = 0; // tag index for roots and leaves, segment id for lines

    friend bool operator==(const FlowNode&, const FlowNode&) = default;
    friend auto operator<=>(const FlowNode&, const FlowNode&) = default;
};

// Node 0 is the root; parent[0] == -1 and every other parent precedes its child.
struct FlowTree {
    std::vector<FlowNode> nodes;
    std::vector<int> parent;

    int outlet() const { return nodes.front().ref; }

    std::vector<std::vector<int>> children() const {
        std::vector<std::vector<int>> out(nodes.size());
        for (std::size_t i = 1; i < nodes.size(); ++i) out[parent[i]].push_back(static_cast<int>(i));
        return out;
    }

    // Nodes on the longest root-to-leaf path.
    int height() const {
        std::vector<int> depth(nodes.size(), 1);
        int best = nodes.empty() ? 0 : 1;
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            depth[i] = depth[parent[i]] + 1;
            best = std::max(best, depth[i]);
        }
        return best;
    }
};

struct FlowForest {
    std::vector<FlowTree> trees;

    const FlowTree* find(int outlet) const {
        for (const auto& t : trees)
            if (t.outlet() == outlet) return &t;
        return nullptr;
    }

    // Nodes appearing in more than one tree.
    std::vector<FlowNode> shared_nodes() const {
        std::map<FlowNode, int> seen;
        for (const auto& t : trees) {
            std::set<FlowNode> once(t.nodes.begin() + 1, t.nodes.end());
            for (const auto& n : once) ++seen[n];
        }
        std::vector<FlowNode> out;
        for (const auto& [n, count] : seen)
            if (count > 1) out.push_back(n);
        return out;
    }
};

struct ForestReport {
    std::vector<int> outlets_without_line;
    std::vector<int> dropped_trees; // outlet tag indices
    std::vector<std::string> warnings;
};

// One tree per associated OUTLET tag, in tag order. Lines expand breadth
// first over valid junctions in ascending line id; a per-tree visited set
// keeps the first parent that reached a line. Inlet leaves hang from the line
// their tag is associated with.
inline FlowForest build_forest(const std::vector<Tag>& tags, const std::vector<Association>& tag_links,
                               const std::vector<Junction>& junctions, ForestReport* report = nullptr) {
    std::map<int, std::set<int>> adjacency;
    for (const auto& j : junctions) {
        if (!j.valid || j.a == j.b) continue;
        adjacency[j.a].insert(j.b);
        adjacency[j.b].insert(j.a);
    }
    std::map<int, int> tag_line;
    for (const auto& a : tag_links)
        if (a.kind == ComponentKind::Tag) tag_line[a.component] = a.line;
    std::map<int, std::vector<int>> inlets_on;
    for (const auto& [tag, line] : tag_line)
        if (tags.at(tag).kind == TagKind::Inlet) inlets_on[line].push_back(tag);

    FlowForest forest;
    for (std::size_t t = 0; t < tags.size(); ++t) {
        if (tags[t].kind != TagKind::Outlet) continue;
        const int outlet = static_cast<int>(t);
        const auto it = tag_line.find(outlet);
        if (it == tag_line.end()) {
            if (report) report->outlets_without_line.push_back(outlet);
            continue;
        }
        FlowTree tree;
        tree.nodes.push_back({NodeKind::OutletRoot, outlet});
        tree.parent.push_back(-1);
        tree.nodes.push_back({NodeKind::Line, it->second});
        tree.parent.push_back(0);
        std::map<int, int> order{{it->second, 0}}; // discovery rank per line
        std::set<std::pair<int, int>> loops;
        std::deque<int> queue{1};
        while (!queue.empty()) {
            const int node = queue.front();
            queue.pop_front();
            const int line = tree.nodes[node].ref;
            for (int inlet : inlets_on[line]) {
                tree.nodes.push_back({NodeKind::InletLeaf, inlet});
                tree.parent.push_back(node);
            }
            const int from = tree.nodes[tree.parent[node]].kind == NodeKind::Line
                                 ? tree.nodes[tree.parent[node]].ref
                                 : -1;
            for (int next : adjacency[line]) {
                if (order.count(next)) {
                    if (next != from) loops.insert({std::min(line, next), std::max(line, next)});
                    continue;
                }
                order.emplace(next, static_cast<int>(order.size()));
                tree.nodes.push_back({NodeKind::Line, next});
                tree.parent.push_back(node);
                queue.push_back(static_cast<int>(tree.nodes.size()) - 1);
            }
        }
        if (report)
            for (auto [a, b] : loops) {
                const bool a_later = order[a] > order[b];
                const int twice = a_later ? a : b, other = a_later ? b : a;
                report->warnings.push_back("outlet " + std::to_string(outlet) + ": line " + std::to_string(twice) +
                                           " also reachable through line " + std::to_string(other) +
                                           "; first parent kept");
            }
        forest.trees.push_back(std::move(tree));
    }
    return forest;
}

// Keeps exactly the nodes on some root-to-inlet path; trees with none are
// dropped.
inline FlowForest prune_forest(const FlowForest& forest, ForestReport* report = nullptr) {
    FlowForest out;
    for (const auto& tree : forest.trees) {
        const std::size_t n = tree.nodes.size();
        std::vector<char> keep(n, 0);
        for (std::size_t i = n; i-- > 1;) {
            if (tree.nodes[i].kind == NodeKind::InletLeaf) keep[i] = 1;
            if (keep[i]) keep[tree.parent[i]] = 1;
        }
        if (n < 2 || !keep[0]) {
            if (report) {
                report->dropped_trees.push_back(tree.outlet());
                report->warnings.push_back("outlet " + std::to_string(tree.outlet()) + " reaches no inlet; tree dropped");
            }
            continue;
        }
        FlowTree pruned;
        std::vector<int> index(n, -1);
        for (std::size_t i = 0; i < n; ++i) {
            if (!keep[i]) continue;
            index[i] = static_cast<int>(pruned.nodes.size());
            pruned.nodes.push_back(tree.nodes[i]);
            pruned.parent.push_back(i == 0 ? -1 : index[tree.parent[i]]);
        }
        out.trees.push_back(std::move(pruned));
    }
    return out;
}

struct PathStep {
    FlowNode node;
    std::vector<int> codes;   // code indices associated with a LINE node
    std::vector<int> symbols; // symbol indices associated with a LINE node
};

using FlowPath = std::vector<PathStep>;

// Every root-to-leaf path of the outlet's tree, depth first in child order.
inline std::vector<FlowPath> query_paths(const FlowForest& forest, int outlet,
                                         const std::vector<Association>& decorations = {}) {
    const FlowTree* tree = forest.find(outlet);
    if (!tree) throw NotFoundError("outlet " + std::to_string(outlet) + " is not in the forest");
    std::map<int, std::vector<int>> codes, symbols;
    for (const auto& a : decorations) {
        if (a.kind == ComponentKind::Code) codes[a.line].push_back(a.component);
        if (a.kind == ComponentKind::Symbol) symbols[a.line].push_back(a.component);
    }
    for (auto* m : {&codes, &symbols})
        for (auto& [line, v] : *m) std::sort(v.begin(), v.end());

    const auto kids = tree->children();
    std::vector<FlowPath> out;
    FlowPath current;
    auto walk = [&](auto&& self, int node) -> void {
        PathStep step{tree->nodes[node], {}, {}};
        if (step.node.kind == NodeKind::Line) {
            step.codes = codes[step.node.ref];
            step.symbols = symbols[step.node.ref];
        }
        current.push_back(std::move(step));
        if (kids[node].empty()) out.push_back(current);
        for (int c : kids[node]) self(self, c);
        current.pop_back();
    };
    walk(walk, 0);
    return out;
}

// Structural checks on a pruned forest. Returns the first violation.
inline std::optional<std::string> check_forest(const FlowForest& forest, const std::vector<Tag>* tags = nullptr) {
    std::set<int> roots;
    for (const auto& t : forest.trees) {
        if (t.nodes.empty() || t.nodes[0].kind != NodeKind::OutletRoot) return "tree without outlet root";
        if (!roots.insert(t.outlet()).second) return "outlet " + std::to_string(t.outlet()) + " roots two trees";
        if (tags && tags->at(t.outlet()).kind != TagKind::Outlet) return "root is not an outlet tag";
        const auto kids = t.children();
        if (kids[0].size() != 1) return "root of outlet " + std::to_string(t.outlet()) + " has " +
                                        std::to_string(kids[0].size()) + " children";
        if (t.height() < 2) return "tree shorter than two levels";
        std::set<FlowNode> seen;
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            if (i > 0 && (t.parent[i] < 0 || t.parent[i] >= static_cast<int>(i))) return "parent order broken";
            if (i > 0 && t.nodes[i].kind == NodeKind::OutletRoot) return "outlet below the root";
            if (!seen.insert(t.nodes[i]).second) return "node repeated within one tree";
            const bool leaf = kids[i].empty();
            if (leaf && t.nodes[i].kind != NodeKind::InletLeaf) return "leaf that is not an inlet";
            if (!leaf && t.nodes[i].kind == NodeKind::InletLeaf) return "inlet with children";
            if (t.nodes[i].kind == NodeKind::InletLeaf && tags && tags->at(t.nodes[i].ref).kind != TagKind::Inlet)
                return "leaf tag is not an inlet";
        }
    }
    return std::nullopt;
}

} // namespace pidgraph
