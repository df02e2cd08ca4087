#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pidgraph/pidgraph.hpp"

namespace pidgraph::cli {

enum Exit : int { kOk = 0, kFailure = 1, kInput = 2, kSchema = 3, kQuery = 4, kRender = 5 };

inline int exit_code(const std::exception& e) {
    if (dynamic_cast<const InputError*>(&e)) return kInput;
    if (dynamic_cast<const SchemaError*>(&e)) return kSchema;
    if (dynamic_cast<const NotFoundError*>(&e)) return kQuery;
    if (dynamic_cast<const RenderError*>(&e) || dynamic_cast<const DimensionError*>(&e)) return kRender;
    return kFailure;
}

namespace fs = std::filesystem;

struct ExtractOptions {
    std::vector<std::string> images;
    std::string out;
    std::optional<std::string> config, text_json, symbols_json, overlay, code_pattern;
    std::optional<double> symbol_threshold;
    bool sidecars = false;
    bool no_match = false;
    int jobs = 1;
};

inline std::optional<std::string> sidecar(const std::string& image, const char* suffix) {
    const fs::path p = fs::path(image).replace_extension(suffix);
    return fs::exists(p) ? std::optional<std::string>(p.string()) : std::nullopt;
}

inline Result extract_one(const std::string& image, const PipelineConfig& cfg, std::optional<std::string> text_json,
                          std::optional<std::string> symbols_json, GrayImage* keep = nullptr) {
    GrayImage gray = read_gray(image);
    const SheetBounds bounds = std::make_pair(gray.width(), gray.height());
    ExtractInputs in;
    if (text_json) in.text = ingest_text_regions(*text_json, bounds);
    if (symbols_json) in.symbols = ingest_symbol_detections(*symbols_json, bounds);
    Result r = extract(gray, cfg, in);
    if (keep) *keep = std::move(gray);
    return r;
}

inline int cmd_extract(const ExtractOptions& o, std::ostream& out, std::ostream& err) {
    PipelineConfig cfg = load_config(o.config);
    if (o.code_pattern) cfg.code_pattern = *o.code_pattern;
    if (o.symbol_threshold) cfg.symbol_threshold = *o.symbol_threshold;
    if (o.no_match) cfg.match_symbols = false;

    if (o.images.size() == 1) {
        const std::string& img = o.images.front();
        GrayImage gray(1, 1);
        const Result r = extract_one(img, cfg, o.text_json ? o.text_json : o.sidecars ? sidecar(img, ".text.json") : std::nullopt,
                                     o.symbols_json ? o.symbols_json : o.sidecars ? sidecar(img, ".symbols.json") : std::nullopt,
                                     &gray);
        if (o.out.empty() || o.out == "-") out << serialize(r);
        else write_text_file(o.out, serialize(r));
        if (o.overlay) render_overlay(gray, r).write(*o.overlay);
        return kOk;
    }

    if (o.text_json || o.symbols_json || o.overlay)
        throw ParameterError("--text-json, --symbols-json and --overlay take a single image; use --sidecars");
    if (o.out.empty()) throw ParameterError("several images need --out DIR");
    fs::create_directories(o.out);
    std::vector<int> codes(o.images.size(), kOk);
    std::vector<std::string> messages(o.images.size());
    parallel_for(o.images.size(), o.jobs, [&](std::size_t i) {
        const std::string& img = o.images[i];
        try {
            const Result r = extract_one(img, cfg, o.sidecars ? sidecar(img, ".text.json") : std::nullopt,
                                         o.sidecars ? sidecar(img, ".symbols.json") : std::nullopt);
            const fs::path target = fs::path(o.out) / fs::path(img).filename().replace_extension(".result.json");
            write_text_file(target.string(), serialize(r));
        } catch (const Error& e) {
            codes[i] = exit_code(e);
            messages[i] = e.what();
        }
    });
    int first = kOk;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] == kOk) continue;
        err << "error: " << messages[i] << "\n";
        if (first == kOk) first = codes[i];
    }
    return first;
}

struct TileOptions {
    std::string image, out;
    std::optional<std::string> mask, config;
    std::optional<int> patch_size, stride, dilation;
    bool translate = false, rotate = false;
    std::uint32_t seed = 0;
};

inline int cmd_tile(const TileOptions& o, std::ostream& out) {
    AnnotationConfig cfg = load_config(o.config).annotation;
    if (o.patch_size) cfg.patch_size = *o.patch_size;
    if (o.stride) cfg.stride = *o.stride;
    if (o.dilation) cfg.boundary_dilation = *o.dilation;
    cfg.translate = cfg.translate || o.translate;
    cfg.rotate = cfg.rotate || o.rotate;
    cfg.validate();

    const GrayImage sheet = read_gray(o.image);
    std::optional<BinaryImage> mask;
    if (o.mask) mask = binarize(read_gray(*o.mask));
    const auto patches = augment_patches(tile_sheet(sheet, cfg, mask ? &*mask : nullptr), cfg, o.seed);

    fs::create_directories(o.out);
    Json list = Json::array();
    int variant = 0;
    for (std::size_t i = 0; i < patches.size(); ++i) {
        const Patch& p = patches[i];
        variant = (i > 0 && patches[i - 1].ox == p.ox && patches[i - 1].oy == p.oy) ? variant + 1 : 0;
        std::string stem = "patch_" + std::to_string(p.ox) + "_" + std::to_string(p.oy);
        if (variant) stem += "_v" + std::to_string(variant);
        const fs::path image = fs::path(o.out) / (stem + ".png");
        write_gray(image.string(), p.image);
        Json rec{{"file", stem + ".png"}, {"ox", p.ox}, {"oy", p.oy}, {"variant", variant},
                 {"sha256", sha256_file(image.string())}};
        if (p.annotation) {
            const fs::path ann = fs::path(o.out) / (stem + ".boundary.png");
            write_gray(ann.string(), render(export_mask_boundaries(*p.annotation, cfg)));
            rec["boundary"] = stem + ".boundary.png";
            rec["boundary_sha256"] = sha256_file(ann.string());
        }
        list.push_back(std::move(rec));
    }
    Json manifest{{"schema", "pid-tiles/1"},
                  {"image", {{"width", sheet.width()}, {"height", sheet.height()}}},
                  {"patch_size", cfg.patch_size},
                  {"stride", cfg.stride},
                  {"boundary_dilation", cfg.boundary_dilation},
                  {"seed", o.seed},
                  {"patches", std::move(list)}};
    write_text_file((fs::path(o.out) / "tiles.json").string(), manifest.dump(2) + "\n");
    out << patches.size() << " patch(es) written to " << o.out << "\n";
    return kOk;
}

struct SynthOptions {
    std::string out;
    std::optional<std::string> spec;
    std::string seeds = "0:1";
    int jobs = 1;
    bool print_spec = false;
};

inline int cmd_synth(const SynthOptions& o, std::ostream& out) {
    const SheetSpec spec = o.spec ? spec_from_json(read_json_file(*o.spec), *o.spec) : SheetSpec{};
    if (o.print_spec) {
        out << spec_to_json(spec).dump(2) << "\n";
        return kOk;
    }
    if (o.out.empty()) throw ParameterError("synth needs --out DIR");
    const SeedRange seeds = parse_seed_range(o.seeds);
    write_corpus(spec, seeds, o.out, o.jobs);
    out << seeds.size() << " sheet(s) written to " << o.out << "\n";
    return kOk;
}

struct EvalOptions {
    std::string pred, truth;
    double iou = 0.5;
    double endpoint_tolerance = 3.0;
    std::optional<std::string> json;
};

inline int cmd_eval(const EvalOptions& o, std::ostream& out) {
    const Result pred = read_result(o.pred);
    const Result truth = read_result(o.truth);
    const Evaluation ev = evaluate(pred, truth, {o.iou, o.endpoint_tolerance});
    out << evaluation_table(ev);
    out << "Symbol classes (precision recall f1):\n";
    for (int c = 0; c < kSymbolClassCount; ++c) {
        if (!ev.confusion.row_sum(c) && !ev.confusion.col_sum(c)) continue;
        const ClassScores s = ev.confusion.scores(c);
        char line[96];
        std::snprintf(line, sizeof line, "  %-6s %.3f %.3f %.3f\n", std::string(kSymbolLabels[c]).c_str(), s.precision,
                      s.recall, s.f1);
        out << line;
    }
    if (o.json) write_text_file(*o.json, evaluation_to_json(ev).dump(2) + "\n");
    return kOk;
}

struct QueryOptions {
    std::string result;
    std::optional<int> outlet;
    bool all = false;
};

inline int cmd_query(const QueryOptions& o, std::ostream& out) {
    if (o.all == o.outlet.has_value()) throw ParameterError("query needs exactly one of OUTLET or --all");
    const Result r = read_result(o.result);
    for (const auto& line : describe_paths(r, o.outlet)) out << line << "\n";
    return kOk;
}

inline int cmd_overlay(const std::string& image, const std::string& result, const std::string& png) {
    render_overlay(read_gray(image), read_result(result)).write(png);
    return kOk;
}

// Parses `args` (without the program name) and runs one subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Turns P&ID sheet images into pipeline flow graphs."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "pidgraph 1.0");

    ExtractOptions ex;
    auto* extract_cmd = app.add_subcommand("extract", "Detect components and build the flow forest");
    extract_cmd->add_option("images", ex.images, "Sheet image(s)")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("-o,--out", ex.out, "Result JSON (one image) or directory (several); default stdout");
    extract_cmd->add_option("--config", ex.config, "Pipeline config JSON (default $" + std::string(kConfigEnv) + ")");
    extract_cmd->add_option("--text-json", ex.text_json, "Text regions with transcriptions");
    extract_cmd->add_option("--symbols-json", ex.symbols_json, "Symbol detections");
    extract_cmd->add_flag("--sidecars", ex.sidecars, "Use <stem>.text.json / <stem>.symbols.json next to each image");
    extract_cmd->add_option("--overlay", ex.overlay, "Also write an overlay PNG");
    extract_cmd->add_option("--code-pattern", ex.code_pattern, "Override the pipeline-code grammar");
    extract_cmd->add_option("--symbol-threshold", ex.symbol_threshold, "Override the template score threshold");
    extract_cmd->add_flag("--no-template-match", ex.no_match, "Skip the built-in symbol matcher");
    extract_cmd->add_option("-j,--jobs", ex.jobs, "Sheets processed in parallel")->check(CLI::PositiveNumber);

    TileOptions tl;
    auto* tile_cmd = app.add_subcommand("tile", "Cut a sheet into training patches");
    tile_cmd->add_option("image", tl.image, "Sheet image")->required()->check(CLI::ExistingFile);
    tile_cmd->add_option("-o,--out", tl.out, "Output directory")->required();
    tile_cmd->add_option("--mask", tl.mask, "Symbol mask image (dark pixels are the mask)");
    tile_cmd->add_option("--config", tl.config, "Config JSON supplying the annotation section");
    tile_cmd->add_option("--patch-size", tl.patch_size, "Patch side in pixels");
    tile_cmd->add_option("--stride", tl.stride, "Step between patch origins");
    tile_cmd->add_option("--dilation", tl.dilation, "Boundary dilation (odd)");
    tile_cmd->add_flag("--translate", tl.translate, "Add translated variants");
    tile_cmd->add_flag("--rotate", tl.rotate, "Add rotated variants");
    tile_cmd->add_option("--seed", tl.seed, "Augmentation seed");

    SynthOptions sy;
    auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic sheets with ground truth");
    synth_cmd->add_option("-o,--out", sy.out, "Output directory");
    synth_cmd->add_option("--spec", sy.spec, "Sheet spec JSON (default spec when absent)");
    synth_cmd->add_option("--seeds", sy.seeds, "Seed range A:B (half-open) or a single seed")->capture_default_str();
    synth_cmd->add_option("-j,--jobs", sy.jobs, "Sheets generated in parallel")->check(CLI::PositiveNumber);
    synth_cmd->add_flag("--print-spec", sy.print_spec, "Print the effective spec and exit");

    EvalOptions ev;
    auto* eval_cmd = app.add_subcommand("eval", "Score a result against ground truth");
    eval_cmd->add_option("prediction", ev.pred, "Result JSON")->required();
    eval_cmd->add_option("truth", ev.truth, "Ground-truth JSON")->required();
    eval_cmd->add_option("--iou", ev.iou, "Detection IoU threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--endpoint-tolerance", ev.endpoint_tolerance, "Segment endpoint tolerance in pixels")
        ->capture_default_str();
    eval_cmd->add_option("--json", ev.json, "Write metrics JSON");

    QueryOptions qu;
    auto* query_cmd = app.add_subcommand("query", "List outlet-to-inlet paths");
    query_cmd->add_option("result", qu.result, "Result JSON")->required();
    query_cmd->add_option("outlet", qu.outlet, "Outlet tag id");
    query_cmd->add_flag("--all", qu.all, "Every outlet");

    std::string ov_image, ov_result, ov_png;
    auto* overlay_cmd = app.add_subcommand("overlay", "Draw a result over its sheet");
    overlay_cmd->add_option("image", ov_image, "Sheet image")->required();
    overlay_cmd->add_option("result", ov_result, "Result JSON")->required();
    overlay_cmd->add_option("png", ov_png, "Output PNG")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kFailure;
    }

    try {
        if (*extract_cmd) return cmd_extract(ex, out, err);
        if (*tile_cmd) return cmd_tile(tl, out);
        if (*synth_cmd) return cmd_synth(sy, out);
        if (*eval_cmd) return cmd_eval(ev, out);
        if (*query_cmd) return cmd_query(qu, out);
        if (*overlay_cmd) return cmd_overlay(ov_image, ov_result, ov_png);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kRender;
    }
    return kFailure;
}

} // namespace pidgraph::cli
