#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "pidgraph/error.hpp"
#include "pidgraph/geometry.hpp"
#include "pidgraph/image.hpp"

namespace pidgraph {

struct Component {
    int id = 0;
    long long pixel_count = 0;
    BBox bbox;
};

// Global threshold maximizing inter-class variance. Returns t such that ink
// is luma < t. When several thresholds tie for the maximum (a gap between
// the two intensity modes) the midpoint of the tied run is used; a
// single-valued image falls back to 128.
inline int otsu_threshold(const GrayImage& image) {
    std::array<long long, 256> hist{};
    for (auto v : image.pixels()) ++hist[v];

    long double total_sum = 0;
    long long total = 0;
    for (int v = 0; v < 256; ++v) {
        total_sum += static_cast<long double>(v) * hist[v];
        total += hist[v];
    }

    long double best = -1;
    int first = -1;
    int last = -1;
    long long n0 = 0;
    long double s0 = 0;
    for (int t = 1; t < 256; ++t) {
        n0 += hist[t - 1];
        s0 += static_cast<long double>(t - 1) * hist[t - 1];
        const long long n1 = total - n0;
        if (n0 == 0 || n1 == 0) continue;
        const long double m0 = s0 / n0;
        const long double m1 = (total_sum - s0) / n1;
        const long double var = static_cast<long double>(n0) * n1 * (m0 - m1) * (m0 - m1);
        if (var > best * (1 + 1e-12L)) {
            best = var;
            first = last = t;
        } else if (var >= best * (1 - 1e-12L) && last == t - 1) {
            last = t;
        }
    }
    if (first < 0) return 128;
    return (first + last) / 2;
}

inline BinaryImage threshold(const GrayImage& image, int t) {
    std::vector<std::uint8_t> ink(image.pixels().size());
    auto src = image.pixels();
    for (std::size_t i = 0; i < ink.size(); ++i) ink[i] = src[i] < t ? 1 : 0;
    return BinaryImage(image.width(), image.height(), std::move(ink));
}

inline BinaryImage binarize(const GrayImage& image) {
    return threshold(image, otsu_threshold(image));
}

namespace detail {

// Neighbor order P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr int kNx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

inline std::array<int, 8> neighbors(const BinaryImage& img, int x, int y) {
    std::array<int, 8> n{};
    for (int k = 0; k < 8; ++k) n[k] = img.ink(x + kNx[k], y + kNy[k]) ? 1 : 0;
    return n;
}

// Number of 8-connected foreground groups among the 8 neighbors.
inline int neighbor_groups(const std::array<int, 8>& n) {
    int groups = 0;
    std::array<bool, 8> seen{};
    for (int s = 0; s < 8; ++s) {
        if (!n[s] || seen[s]) continue;
        ++groups;
        int stack[8];
        int top = 0;
        stack[top++] = s;
        seen[s] = true;
        while (top) {
            const int c = stack[--top];
            for (int o = 0; o < 8; ++o) {
                if (!n[o] || seen[o]) continue;
                if (std::abs(kNx[o] - kNx[c]) <= 1 && std::abs(kNy[o] - kNy[c]) <= 1) {
                    seen[o] = true;
                    stack[top++] = o;
                }
            }
        }
    }
    return groups;
}

inline bool full_block(const BinaryImage& img, int x, int y) {
    return img.ink(x, y) && img.ink(x + 1, y) && img.ink(x, y + 1) && img.ink(x + 1, y + 1);
}

} // namespace detail

// Zhang-Suen two-subiteration thinning. Two guards keep the classic scheme
// topology-safe: a 2x2 block whose four pixels are all marked in the same
// pass keeps one pixel, and leftover 2x2 blocks are thinned afterwards by
// deleting simple, non-end pixels. Free ends are then restored to the
// stroke's extent.
inline BinaryImage skeletonize(const BinaryImage& image) {
    BinaryImage img = image;
    const int w = img.width();
    const int h = img.height();
    std::vector<std::uint8_t> mark(static_cast<std::size_t>(w) * h);

    std::vector<std::pair<int, int>> fg;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (img.at(x, y)) fg.emplace_back(x, y);

    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<std::pair<int, int>> marked;
            for (auto [x, y] : fg) {
                if (!img.at(x, y)) continue;
                const auto n = detail::neighbors(img, x, y);
                int b = 0;
                for (int v : n) b += v;
                if (b < 2 || b > 6) continue;
                int a = 0;
                for (int k = 0; k < 8; ++k) a += (n[k] == 0 && n[(k + 1) % 8] == 1);
                if (a != 1) continue;
                // n[0]=P2 N, n[2]=P4 E, n[4]=P6 S, n[6]=P8 W
                if (pass == 0) {
                    if (n[0] * n[2] * n[4] != 0 || n[2] * n[4] * n[6] != 0) continue;
                } else {
                    if (n[0] * n[2] * n[6] != 0 || n[0] * n[4] * n[6] != 0) continue;
                }
                marked.emplace_back(x, y);
                mark[static_cast<std::size_t>(y) * w + x] = 1;
            }
            auto is_marked = [&](int x, int y) {
                return x >= 0 && y >= 0 && x < w && y < h &&
                       mark[static_cast<std::size_t>(y) * w + x];
            };
            for (auto [x, y] : marked) {
                if (!is_marked(x, y)) continue;
                if (is_marked(x + 1, y) && is_marked(x, y + 1) && is_marked(x + 1, y + 1) &&
                    detail::full_block(img, x, y)) {
                    mark[static_cast<std::size_t>(y) * w + x] = 0;
                }
            }
            for (auto [x, y] : marked) {
                auto& m = mark[static_cast<std::size_t>(y) * w + x];
                if (m) {
                    img.set(x, y, false);
                    changed = true;
                }
                m = 0;
            }
        }
        std::erase_if(fg, [&](auto p) { return !img.at(p.first, p.second); });
    }

    bool cleaned = true;
    while (cleaned) {
        cleaned = false;
        for (auto [x, y] : fg) {
            if (!detail::full_block(img, x, y)) continue;
            const std::pair<int, int> cell[4] = {{x, y}, {x + 1, y}, {x, y + 1}, {x + 1, y + 1}};
            for (auto [cx, cy] : cell) {
                const auto n = detail::neighbors(img, cx, cy);
                int b = 0;
                for (int v : n) b += v;
                const bool on_edge = !n[0] || !n[2] || !n[4] || !n[6];
                if (b >= 2 && on_edge && detail::neighbor_groups(n) == 1) {
                    img.set(cx, cy, false);
                    cleaned = true;
                    break;
                }
            }
        }
        std::erase_if(fg, [&](auto p) { return !img.at(p.first, p.second); });
    }

    // Thinning pulls free ends inward by about half the stroke width; walk
    // each end pixel back out along its own direction while the source still
    // has ink and the new pixel touches nothing but the current end.
    const std::vector<std::pair<int, int>> ends = [&] {
        std::vector<std::pair<int, int>> e;
        for (auto [x, y] : fg) {
            const auto n = detail::neighbors(img, x, y);
            int b = 0;
            for (int v : n) b += v;
            if (b == 1) e.emplace_back(x, y);
        }
        return e;
    }();
    for (auto [x, y] : ends) {
        const auto n = detail::neighbors(img, x, y);
        int k = 0;
        while (!n[k]) ++k;
        const int dx = -detail::kNx[k];
        const int dy = -detail::kNy[k];
        int px = x, py = y;
        for (;;) {
            const int qx = px + dx, qy = py + dy;
            if (!image.ink(qx, qy) || img.at(qx, qy)) break;
            bool touches_other = false;
            for (int o = 0; o < 8 && !touches_other; ++o) {
                const int rx = qx + detail::kNx[o], ry = qy + detail::kNy[o];
                if ((rx != px || ry != py) && img.ink(rx, ry)) touches_other = true;
            }
            if (touches_other) break;
            img.set(qx, qy, true);
            px = qx;
            py = qy;
        }
    }
    return img;
}

// Boxes are clipped to the image.
inline BinaryImage erase_regions(const BinaryImage& image, std::span<const BBox> boxes) {
    BinaryImage out = image;
    for (const auto& box : boxes) {
        const BBox c = box.clipped(out.width(), out.height());
        for (int y = c.y0; y <= c.y1; ++y)
            for (int x = c.x0; x <= c.x1; ++x) out.set(x, y, false);
    }
    return out;
}

struct Labeling {
    std::vector<int> labels; // -1 for background
    std::vector<Component> components;
};

// 8-connected labeling; ids follow raster order of each component's first pixel.
inline Labeling label_components(const BinaryImage& image) {
    const int w = image.width();
    const int h = image.height();
    Labeling out;
    out.labels.assign(static_cast<std::size_t>(w) * h, -1);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (!image.at(x, y) || out.labels[i] >= 0) continue;
            Component comp;
            comp.id = static_cast<int>(out.components.size());
            comp.bbox = {x, y, x, y};
            out.labels[i] = comp.id;
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                ++comp.pixel_count;
                comp.bbox = unite(comp.bbox, {cx, cy, cx, cy});
                for (int k = 0; k < 8; ++k) {
                    const int nx = cx + detail::kNx[k];
                    const int ny = cy + detail::kNy[k];
                    if (!image.ink(nx, ny)) continue;
                    auto& l = out.labels[static_cast<std::size_t>(ny) * w + nx];
                    if (l >= 0) continue;
                    l = comp.id;
                    stack.emplace_back(nx, ny);
                }
            }
            out.components.push_back(comp);
        }
    }
    return out;
}

inline std::vector<Component> connected_components(const BinaryImage& image) {
    return label_components(image).components;
}

namespace detail {
// Separable square max/min filter; pixels outside the image read as `outside`.
inline BinaryImage square_filter(const BinaryImage& image, int side, bool grow) {
    if (side < 1 || side % 2 == 0) {
        throw ParameterError("kernel side must be odd and >= 1, got " + std::to_string(side));
    }
    const int r = side / 2;
    const int w = image.width();
    const int h = image.height();
    std::vector<std::uint8_t> tmp(static_cast<std::size_t>(w) * h);
    std::vector<std::uint8_t> out(tmp.size());
    auto src = image.pixels();
    const std::uint8_t hit = grow ? 1 : 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = grow ? 0 : 1;
            for (int d = -r; d <= r; ++d) {
                const int xx = x + d;
                const std::uint8_t s =
                    (xx < 0 || xx >= w) ? 0 : src[static_cast<std::size_t>(y) * w + xx];
                if (s == hit) {
                    v = hit;
                    break;
                }
            }
            tmp[static_cast<std::size_t>(y) * w + x] = v;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = grow ? 0 : 1;
            for (int d = -r; d <= r; ++d) {
                const int yy = y + d;
                const std::uint8_t s =
                    (yy < 0 || yy >= h) ? 0 : tmp[static_cast<std::size_t>(yy) * w + x];
                if (s == hit) {
                    v = hit;
                    break;
                }
            }
            out[static_cast<std::size_t>(y) * w + x] = v;
        }
    }
    return BinaryImage(w, h, std::move(out));
}
} // namespace detail

inline BinaryImage dilate(const BinaryImage& image, int side) {
    return detail::square_filter(image, side, true);
}

// Outside the image counts as background, so ink touching the border erodes.
inline BinaryImage erode(const BinaryImage& image, int side) {
    return detail::square_filter(image, side, false);
}

// Background pixels not 4-connected to the image border.
inline BinaryImage hole_mask(const BinaryImage& image) {
    const int w = image.width();
    const int h = image.height();
    std::vector<std::uint8_t> outside(static_cast<std::size_t>(w) * h);
    std::deque<std::pair<int, int>> queue;
    auto seed = [&](int x, int y) {
        auto& o = outside[static_cast<std::size_t>(y) * w + x];
        if (!image.at(x, y) && !o) {
            o = 1;
            queue.emplace_back(x, y);
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k];
            const int ny = y + dy[k];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            seed(nx, ny);
        }
    }
    std::vector<std::uint8_t> holes(outside.size());
    auto src = image.pixels();
    for (std::size_t i = 0; i < holes.size(); ++i) holes[i] = !src[i] && !outside[i];
    return BinaryImage(w, h, std::move(holes));
}

// Maximal foreground runs along the straight pixel path from (x0,y0) to
// (x1,y1) (axis-aligned or 45-degree). Off-image pixels read as background.
inline int count_runs(const BinaryImage& image, int x0, int y0, int x1, int y1) {
    const int steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
    const int sx = (x1 > x0) - (x1 < x0);
    const int sy = (y1 > y0) - (y1 < y0);
    int runs = 0;
    bool prev = false;
    for (int i = 0; i <= steps; ++i) {
        const bool cur = image.ink(x0 + sx * i, y0 + sy * i);
        if (cur && !prev) ++runs;
        prev = cur;
    }
    return runs;
}

} // namespace pidgraph
