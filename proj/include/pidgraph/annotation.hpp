#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pidgraph/error.hpp"
#include "pidgraph/image.hpp"
#include "pidgraph/raster.hpp"
#include "pidgraph/symbols.hpp"

namespace pidgraph {

struct AnnotationConfig {
    int patch_size = 400;
    int stride = 400;
    int boundary_dilation = 3;
    bool translate = false;
    bool rotate = false;
    int translation_variants = 4;
    int rotation_variants = 4;
    int max_shift = 20; // pixels

    void validate() const {
        if (stride < 1 || patch_size < stride) {
            throw ParameterError("annotation config needs patch_size >= stride >= 1");
        }
        if (boundary_dilation < 1 || boundary_dilation % 2 == 0) {
            throw ParameterError("boundary dilation must be odd and >= 1");
        }
        if (translation_variants < 0 || rotation_variants < 0 || max_shift < 1) {
            throw ParameterError("augmentation counts must be >= 0 and max_shift >= 1");
        }
    }
};

struct Patch {
    int ox = 0;
    int oy = 0;
    GrayImage image{1, 1};
    std::optional<BinaryImage> annotation;
};

namespace detail {

// Origins along one axis: step by `stride` until a patch reaches the edge.
inline std::vector<int> tile_origins(int extent, int size, int stride) {
    std::vector<int> out;
    for (int o = 0;; o += stride) {
        out.push_back(o);
        if (o + size >= extent) break;
    }
    return out;
}

} // namespace detail

// Row-major patches; area beyond the sheet is background (255).
inline std::vector<Patch> tile_sheet(const GrayImage& image, const AnnotationConfig& config = {},
                                     const BinaryImage* mask = nullptr) {
    config.validate();
    if (mask && (mask->width() != image.width() || mask->height() != image.height())) {
        throw DimensionError("annotation mask does not match the sheet");
    }
    const int s = config.patch_size;
    std::vector<Patch> out;
    for (int oy : detail::tile_origins(image.height(), s, config.stride)) {
        for (int ox : detail::tile_origins(image.width(), s, config.stride)) {
            Patch p{ox, oy, GrayImage(s, s, 255), std::nullopt};
            if (mask) p.annotation = BinaryImage(s, s);
            for (int y = 0; y < s && oy + y < image.height(); ++y)
                for (int x = 0; x < s && ox + x < image.width(); ++x) {
                    p.image.set(x, y, image.at(ox + x, oy + y));
                    if (mask) p.annotation->set(x, y, mask->at(ox + x, oy + y));
                }
            out.push_back(std::move(p));
        }
    }
    return out;
}

// One-pixel inner boundary (mask minus its 3x3 erosion), then dilated.
inline BinaryImage export_mask_boundaries(const BinaryImage& mask, const AnnotationConfig& config = {}) {
    config.validate();
    const BinaryImage inner = erode(mask, 3);
    std::vector<std::uint8_t> edge(mask.pixels().begin(), mask.pixels().end());
    auto in = inner.pixels();
    for (std::size_t i = 0; i < edge.size(); ++i) edge[i] = edge[i] && !in[i];
    return dilate(BinaryImage(mask.width(), mask.height(), std::move(edge)), config.boundary_dilation);
}

inline GrayImage rotate_quarters(const GrayImage& img, int quarters) {
    quarters = ((quarters % 4) + 4) % 4;
    const int w = img.width(), h = img.height();
    const bool swap = quarters % 2 == 1;
    GrayImage out(swap ? h : w, swap ? w : h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int nx = x, ny = y;
            if (quarters == 1) { nx = h - 1 - y; ny = x; }
            else if (quarters == 2) { nx = w - 1 - x; ny = h - 1 - y; }
            else if (quarters == 3) { nx = y; ny = w - 1 - x; }
            out.set(nx, ny, img.at(x, y));
        }
    return out;
}

inline GrayImage shift(const GrayImage& img, int dx, int dy) {
    GrayImage out(img.width(), img.height(), 255);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (img.in_bounds(x - dx, y - dy)) out.set(x, y, img.at(x - dx, y - dy));
    return out;
}

inline BinaryImage shift(const BinaryImage& img, int dx, int dy) {
    BinaryImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) out.set(x, y, img.ink(x - dx, y - dy));
    return out;
}

// Each input is followed by its variants: `rotation_variants` quarter-turn
// rotations (one to three turns each) and `translation_variants` shifts
// within +-max_shift, never the identity. Variants keep the patch offset.
// Raw engine output drives every draw so a seed yields the same patches
// under any standard library.
inline std::vector<Patch> augment_patches(const std::vector<Patch>& patches,
                                          const AnnotationConfig& config, std::uint32_t seed) {
    config.validate();
    std::mt19937 rng(seed);
    auto draw = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint32_t>(n)); };
    std::vector<Patch> out;
    for (const auto& p : patches) {
        out.push_back(p);
        if (config.rotate) {
            for (int k = 0; k < config.rotation_variants; ++k) {
                const int quarters = 1 + draw(3);
                Patch v{p.ox, p.oy, rotate_quarters(p.image, quarters), std::nullopt};
                if (p.annotation) v.annotation = rotate_quarters(*p.annotation, quarters);
                out.push_back(std::move(v));
            }
        }
        if (config.translate) {
            for (int k = 0; k < config.translation_variants; ++k) {
                int dx = 0, dy = 0;
                while (dx == 0 && dy == 0) {
                    dx = draw(2 * config.max_shift + 1) - config.max_shift;
                    dy = draw(2 * config.max_shift + 1) - config.max_shift;
                }
                Patch v{p.ox, p.oy, shift(p.image, dx, dy), std::nullopt};
                if (p.annotation) v.annotation = shift(*p.annotation, dx, dy);
                out.push_back(std::move(v));
            }
        }
    }
    return out;
}

} // namespace pidgraph
