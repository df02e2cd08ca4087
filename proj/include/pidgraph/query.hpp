#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pidgraph/flow.hpp"
#include "pidgraph/result.hpp"

namespace pidgraph {

// One line per root-to-inlet path, e.g.
//   outlet 0 -> line 2 [3"-AB1234567-12345A-CD; Bl-V] -> line 5 -> inlet 4
inline std::string format_path(const Result& r, const FlowPath& path) {
    std::string out;
    for (const auto& step : path) {
        if (!out.empty()) out += " -> ";
        switch (step.node.kind) {
        case NodeKind::OutletRoot: out += "outlet "; break;
        case NodeKind::Line: out += "line "; break;
        case NodeKind::InletLeaf: out += "inlet "; break;
        }
        out += std::to_string(step.node.ref);
        std::vector<std::string> notes;
        for (int c : step.codes) notes.push_back(r.codes[c].text);
        for (int s : step.symbols) notes.push_back(std::string(label(r.symbols[s].cls)));
        if (notes.empty()) continue;
        out += " [";
        for (std::size_t i = 0; i < notes.size(); ++i) out += (i ? "; " : "") + notes[i];
        out += "]";
    }
    return out;
}

// Paths of one outlet, or of every tree in forest order when none is named.
inline std::vector<std::string> describe_paths(const Result& r, std::optional<int> outlet) {
    std::vector<int> roots;
    if (outlet) roots.push_back(*outlet);
    else
        for (const auto& t : r.forest.trees) roots.push_back(t.outlet());
    std::vector<std::string> lines;
    for (int root : roots)
        for (const auto& path : query_paths(r.forest, root, r.associations)) lines.push_back(format_path(r, path));
    return lines;
}

} // namespace pidgraph
