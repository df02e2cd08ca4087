#pragma once

#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "pidgraph/annotation.hpp"
#include "pidgraph/codes.hpp"
#include "pidgraph/flow.hpp"
#include "pidgraph/hough.hpp"
#include "pidgraph/json_util.hpp"
#include "pidgraph/lines.hpp"
#include "pidgraph/tags.hpp"

namespace pidgraph {

inline constexpr const char* kConfigEnv = "PID_GRAPH_CONFIG";

struct PipelineConfig {
    std::string code_pattern{kDefaultCodePattern};
    BlobParams blobs;

    TagParams tags;
    int probe_kernel = 21;
    // Tags are erased as their hole bbox grown by these margins; the pointed
    // side needs more since the hole's tip sits further inside the stroke.
    int tag_erase_margin = 3;
    int tag_apex_margin = 4;
    KindMapping mapping;

    HoughParams hough;
    MergeParams merge;
    double junction_tolerance = 5.0;
    int junction_kernel = 21;

    bool match_symbols = true;
    double symbol_threshold = 0.8;
    double symbol_overlap = 0.3;

    AssociationParams association;
    AnnotationConfig annotation;
};

namespace detail {

// Applies the members of one config section; unknown keys are rejected.
class SectionReader {
public:
    SectionReader(const Json& doc, const std::string& name, const std::string& origin)
        : where_(origin + ": " + name) {
        if (!doc.contains(name)) return;
        section_ = &doc[name];
        if (!section_->is_object()) throw SchemaError(where_ + " must be an object");
    }

    template <class T>
    SectionReader& read(const char* key, T& target) {
        seen_.emplace(key, 0);
        if (!section_ || !section_->contains(key)) return *this;
        const Json& v = (*section_)[key];
        const std::string at = where_ + "." + key;
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw SchemaError(at + " must be true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw SchemaError(at + " must be a string");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw SchemaError(at + " must be an integer");
        } else {
            if (!v.is_number()) throw SchemaError(at + " must be a number");
        }
        target = v.get<T>();
        return *this;
    }

    SectionReader& read_kind(const char* key, TagKind& target) {
        std::string s = to_string(target);
        read(key, s);
        try {
            target = parse_tag_kind(s);
        } catch (const ParameterError&) {
            throw SchemaError(where_ + "." + key + " must be INLET or OUTLET");
        }
        return *this;
    }

    void finish() const {
        if (!section_) return;
        for (const auto& [key, value] : section_->items())
            if (!seen_.count(key)) throw SchemaError(where_ + ": unknown key '" + key + "'");
    }

private:
    std::string where_;
    const Json* section_ = nullptr;
    std::map<std::string, int> seen_;
};

} // namespace detail

inline PipelineConfig config_from_json(const Json& doc, const std::string& origin,
                                       PipelineConfig cfg = {}) {
    if (!doc.is_object()) throw SchemaError(origin + ": config must be a JSON object");
    static const char* sections[] = {"schema", "codes", "tags", "lines", "symbols", "flow", "annotation"};
    for (const auto& [key, value] : doc.items())
        if (std::find(std::begin(sections), std::end(sections), key) == std::end(sections))
            throw SchemaError(origin + ": unknown section '" + key + "'");

    detail::SectionReader(doc, "codes", origin)
        .read("pattern", cfg.code_pattern)
        .read("blob_min_area", cfg.blobs.min_area)
        .read("blob_max_area", cfg.blobs.max_area)
        .read("blob_max_height", cfg.blobs.max_height)
        .read("blob_merge_gap", cfg.blobs.merge_gap)
        .finish();

    std::optional<double> eps;
    double eps_value = cfg.tags.epsilon.value_or(0.0);
    detail::SectionReader tags(doc, "tags", origin);
    tags.read("epsilon_fraction", cfg.tags.epsilon_fraction)
        .read("epsilon", eps_value)
        .read("min_aspect", cfg.tags.min_aspect)
        .read("min_height", cfg.tags.min_height)
        .read("probe_kernel", cfg.probe_kernel)
        .read("erase_margin", cfg.tag_erase_margin)
        .read("apex_margin", cfg.tag_apex_margin)
        .read_kind("apex_side", cfg.mapping.apex_side)
        .read_kind("flat_side", cfg.mapping.flat_side)
        .finish();
    if (eps_value > 0.0) cfg.tags.epsilon = eps_value;

    detail::SectionReader(doc, "lines", origin)
        .read("rho", cfg.hough.rho)
        .read("theta", cfg.hough.theta)
        .read("votes", cfg.hough.votes)
        .read("min_length", cfg.hough.min_length)
        .read("max_gap", cfg.hough.max_gap)
        .read("seed", cfg.hough.seed)
        .read("merge_angle", cfg.merge.angle)
        .read("merge_gap", cfg.merge.gap)
        .read("merge_offset", cfg.merge.offset)
        .read("refit_support", cfg.merge.support)
        .read("walk_gap", cfg.merge.walk_gap)
        .read("junction_tolerance", cfg.junction_tolerance)
        .read("junction_kernel", cfg.junction_kernel)
        .finish();

    detail::SectionReader(doc, "symbols", origin)
        .read("match", cfg.match_symbols)
        .read("threshold", cfg.symbol_threshold)
        .read("overlap", cfg.symbol_overlap)
        .finish();

    detail::SectionReader(doc, "flow", origin)
        .read("tag_max_dist", cfg.association.tag_max_dist)
        .read("code_max_dist", cfg.association.code_max_dist)
        .read("symbol_max_gap", cfg.association.symbol_max_gap)
        .finish();

    detail::SectionReader(doc, "annotation", origin)
        .read("patch_size", cfg.annotation.patch_size)
        .read("stride", cfg.annotation.stride)
        .read("boundary_dilation", cfg.annotation.boundary_dilation)
        .read("translate", cfg.annotation.translate)
        .read("rotate", cfg.annotation.rotate)
        .read("translation_variants", cfg.annotation.translation_variants)
        .read("rotation_variants", cfg.annotation.rotation_variants)
        .read("max_shift", cfg.annotation.max_shift)
        .finish();
    return cfg;
}

inline Json config_to_json(const PipelineConfig& c) {
    Json doc;
    doc["schema"] = "pid-graph-config/1";
    doc["codes"] = {{"pattern", c.code_pattern},
                    {"blob_min_area", c.blobs.min_area},
                    {"blob_max_area", c.blobs.max_area},
                    {"blob_max_height", c.blobs.max_height},
                    {"blob_merge_gap", c.blobs.merge_gap}};
    doc["tags"] = {{"epsilon_fraction", c.tags.epsilon_fraction},
                   {"epsilon", c.tags.epsilon.value_or(0.0)},
                   {"min_aspect", c.tags.min_aspect},
                   {"min_height", c.tags.min_height},
                   {"probe_kernel", c.probe_kernel},
                   {"erase_margin", c.tag_erase_margin},
                   {"apex_margin", c.tag_apex_margin},
                   {"apex_side", to_string(c.mapping.apex_side)},
                   {"flat_side", to_string(c.mapping.flat_side)}};
    doc["lines"] = {{"rho", c.hough.rho},
                    {"theta", c.hough.theta},
                    {"votes", c.hough.votes},
                    {"min_length", c.hough.min_length},
                    {"max_gap", c.hough.max_gap},
                    {"seed", c.hough.seed},
                    {"merge_angle", c.merge.angle},
                    {"merge_gap", c.merge.gap},
                    {"merge_offset", c.merge.offset},
                    {"refit_support", c.merge.support},
                    {"walk_gap", c.merge.walk_gap},
                    {"junction_tolerance", c.junction_tolerance},
                    {"junction_kernel", c.junction_kernel}};
    doc["symbols"] = {{"match", c.match_symbols}, {"threshold", c.symbol_threshold}, {"overlap", c.symbol_overlap}};
    doc["flow"] = {{"tag_max_dist", c.association.tag_max_dist},
                   {"code_max_dist", c.association.code_max_dist},
                   {"symbol_max_gap", c.association.symbol_max_gap}};
    doc["annotation"] = {{"patch_size", c.annotation.patch_size},
                         {"stride", c.annotation.stride},
                         {"boundary_dilation", c.annotation.boundary_dilation},
                         {"translate", c.annotation.translate},
                         {"rotate", c.annotation.rotate},
                         {"translation_variants", c.annotation.translation_variants},
                         {"rotation_variants", c.annotation.rotation_variants},
                         {"max_shift", c.annotation.max_shift}};
    return doc;
}

// Explicit path first, then the environment variable, then built-in defaults.
inline PipelineConfig load_config(const std::optional<std::string>& path) {
    std::optional<std::string> chosen = path;
    if (!chosen) {
        if (const char* env = std::getenv(kConfigEnv); env && *env) chosen = env;
    }
    if (!chosen) return {};
    return config_from_json(read_json_file(*chosen), *chosen);
}

} // namespace pidgraph
