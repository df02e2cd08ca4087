#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pidgraph/error.hpp"

namespace pidgraph {

namespace detail {
inline void check_dimensions(int width, int height, std::size_t size) {
    if (width < 1 || height < 1) {
        throw DimensionError("image dimensions must be positive, got " +
                             std::to_string(width) + "x" + std::to_string(height));
    }
    if (size != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw DimensionError("pixel buffer size does not match " + std::to_string(width) +
                             "x" + std::to_string(height));
    }
}
} // namespace detail

// 8-bit luma raster, row-major.
class GrayImage {
public:
    GrayImage(int width, int height, std::uint8_t fill = 255)
        : GrayImage(width, height,
                    std::vector<std::uint8_t>(
                        static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill)) {}

    GrayImage(int width, int height, std::vector<std::uint8_t> luma)
        : width_(width), height_(height), luma_(std::move(luma)) {
        detail::check_dimensions(width_, height_, luma_.size());
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    std::uint8_t at(int x, int y) const { return luma_[index(x, y)]; }
    void set(int x, int y, std::uint8_t v) { luma_[index(x, y)] = v; }

    std::span<const std::uint8_t> pixels() const { return luma_; }
    std::span<std::uint8_t> pixels() { return luma_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> luma_;
};

// Foreground/background raster; true = ink.
class BinaryImage {
public:
    BinaryImage(int width, int height, bool fill = false)
        : BinaryImage(width, height,
                      std::vector<std::uint8_t>(
                          static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0),
                          fill ? 1 : 0)) {}

    BinaryImage(int width, int height, std::vector<std::uint8_t> ink)
        : width_(width), height_(height), ink_(std::move(ink)) {
        detail::check_dimensions(width_, height_, ink_.size());
        for (auto& v : ink_) v = v ? 1 : 0;
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    bool at(int x, int y) const { return ink_[index(x, y)] != 0; }
    // Out-of-bounds reads as background.
    bool ink(int x, int y) const { return in_bounds(x, y) && at(x, y); }
    void set(int x, int y, bool v) { ink_[index(x, y)] = v ? 1 : 0; }

    std::span<const std::uint8_t> pixels() const { return ink_; }
    std::span<std::uint8_t> pixels() { return ink_; }

    long long ink_count() const {
        long long n = 0;
        for (auto v : ink_) n += v;
        return n;
    }
    bool empty() const { return ink_count() == 0; }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> ink_;
};

// 0 for ink, 255 for background.
inline GrayImage render(const BinaryImage& image) {
    std::vector<std::uint8_t> luma(image.pixels().size());
    auto src = image.pixels();
    for (std::size_t i = 0; i < luma.size(); ++i) luma[i] = src[i] ? 0 : 255;
    return GrayImage(image.width(), image.height(), std::move(luma));
}

} // namespace pidgraph
