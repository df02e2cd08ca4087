#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pidgraph/codes.hpp"
#include "pidgraph/config.hpp"
#include "pidgraph/flow.hpp"
#include "pidgraph/lines.hpp"
#include "pidgraph/raster.hpp"
#include "pidgraph/result.hpp"
#include "pidgraph/symbols.hpp"
#include "pidgraph/tags.hpp"

namespace pidgraph {

// Detections supplied by external detectors; absent ones fall back to the
// built-in classical detectors (text regions then carry no transcription).
struct ExtractInputs {
    std::optional<std::vector<TextRegion>> text;
    std::optional<std::vector<SymbolDetection>> symbols;
};

struct ExtractImages {
    BinaryImage binary{1, 1};
    BinaryImage without_text{1, 1};
    BinaryImage lines_only{1, 1};
    BinaryImage skeleton{1, 1};
};

// Stage order is fixed: text is erased before tags are found, tags are
// erased before the skeleton is taken, and junctions are validated on the
// stroke image that the skeleton came from.
inline Result extract(const GrayImage& gray, const PipelineConfig& cfg, const ExtractInputs& inputs = {},
                      ExtractImages* images = nullptr) {
    Result r;
    r.width = gray.width();
    r.height = gray.height();
    const BinaryImage binary = binarize(gray);

    // Codes.
    const CodeGrammar grammar(cfg.code_pattern);
    std::vector<BBox> text_boxes;
    if (inputs.text) {
        std::vector<int> untranscribed;
        r.codes = filter_codes(*inputs.text, grammar, &untranscribed);
        if (!untranscribed.empty())
            r.report.warnings.push_back(std::to_string(untranscribed.size()) +
                                        " text region(s) without transcription");
        for (const auto& t : *inputs.text) text_boxes.push_back(t.bbox);
    }
    for (const auto& blob : detect_text_blobs(binary, cfg.blobs)) text_boxes.push_back(blob.bbox);
    const BinaryImage without_text = erase_regions(binary, text_boxes);

    // Tags.
    std::vector<BBox> tag_boxes;
    for (const auto& cand : detect_tags(without_text, cfg.tags)) {
        Tag tag = cand;
        try {
            tag = classify_tag(without_text, cand, cfg.probe_kernel, cfg.mapping);
        } catch (const Error& e) {
            r.report.warnings.push_back(std::string("tag ") + std::to_string(r.tags.size()) + ": " + e.what());
        }
        BBox erase = tag.bbox.expanded(cfg.tag_erase_margin);
        if (!tag.direction || *tag.direction == Direction::Right) erase.x1 = tag.bbox.x1 + cfg.tag_apex_margin;
        if (!tag.direction || *tag.direction == Direction::Left) erase.x0 = tag.bbox.x0 - cfg.tag_apex_margin;
        tag_boxes.push_back(erase);
        r.tags.push_back(tag);
    }
    const BinaryImage lines_only = erase_regions(without_text, tag_boxes);

    // Lines and junctions.
    const BinaryImage skeleton = skeletonize(lines_only);
    r.segments = detect_segments(skeleton, cfg.hough, cfg.merge);
    for (const auto& cand : compute_intersections(r.segments, cfg.junction_tolerance))
        r.junctions.push_back(validate_intersection(lines_only, cand, cfg.junction_kernel));

    // Symbols.
    if (inputs.symbols) r.symbols = *inputs.symbols;
    else if (cfg.match_symbols)
        r.symbols = match_templates(without_text, builtin_templates(), cfg.symbol_threshold, cfg.symbol_overlap);

    // Association and structure.
    for (const auto& part : {associate_tags(r.tags, r.segments, cfg.association.tag_max_dist),
                      associate_codes(r.codes, r.segments, cfg.association.code_max_dist),
                      associate_symbols(r.symbols, r.segments, cfg.association.symbol_max_gap)}) {
        r.associations.insert(r.associations.end(), part.links.begin(), part.links.end());
        r.report.unassociated.insert(r.report.unassociated.end(), part.unassociated.begin(),
                                     part.unassociated.end());
    }

    ForestReport fr;
    r.forest = prune_forest(build_forest(r.tags, r.associations, r.junctions, &fr), &fr);
    for (int outlet : fr.outlets_without_line)
        r.report.warnings.push_back("outlet " + std::to_string(outlet) + " has no associated line");
    r.report.dropped_trees = fr.dropped_trees;
    r.report.warnings.insert(r.report.warnings.end(), fr.warnings.begin(), fr.warnings.end());

    if (images) *images = {binary, without_text, lines_only, skeleton};
    return r;
}

} // namespace pidgraph
