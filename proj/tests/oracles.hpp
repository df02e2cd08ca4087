#pragma once

// Brute-force reference computations used only by the tests. Nothing here
// calls into the engine's implementation of the property it checks.

#include <cstdint>
#include <random>
#include <vector>

#include "pidgraph/image.hpp"

namespace oracle {

inline pidgraph::BinaryImage random_strokes(std::mt19937& rng, int w, int h, int strokes) {
    pidgraph::BinaryImage img(w, h);
    std::uniform_int_distribution<int> xs(0, w - 1), ys(0, h - 1), len(3, 30), thick(1, 4),
        orient(0, 2);
    for (int s = 0; s < strokes; ++s) {
        const int x = xs(rng), y = ys(rng), l = len(rng), t = thick(rng), o = orient(rng);
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < t; ++j) {
                int px = x, py = y;
                if (o == 0) { px += i; py += j; }
                else if (o == 1) { px += j; py += i; }
                else { px += i + j; py += i; }
                if (px >= 0 && py >= 0 && px < w && py < h) img.set(px, py, true);
            }
    }
    return img;
}

// Component count by repeated flood fill with an explicit 8-neighborhood.
inline int count_components8(const pidgraph::BinaryImage& img) {
    const int w = img.width(), h = img.height();
    std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
    int count = 0;
    std::vector<int> stack;
    for (int i = 0; i < w * h; ++i) {
        if (!img.at(i % w, i / w) || seen[i]) continue;
        ++count;
        stack.push_back(i);
        seen[i] = 1;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            const int cx = c % w, cy = c / w;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = cx + dx, ny = cy + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const int n = ny * w + nx;
                    if (img.at(nx, ny) && !seen[n]) {
                        seen[n] = 1;
                        stack.push_back(n);
                    }
                }
        }
    }
    return count;
}

inline bool has_full_2x2(const pidgraph::BinaryImage& img) {
    for (int y = 0; y + 1 < img.height(); ++y)
        for (int x = 0; x + 1 < img.width(); ++x)
            if (img.at(x, y) && img.at(x + 1, y) && img.at(x, y + 1) && img.at(x + 1, y + 1))
                return true;
    return false;
}

// Runs along a list of pixel coordinates; off-image counts as background.
inline int runs_along(const pidgraph::BinaryImage& img, const std::vector<std::pair<int, int>>& path) {
    int runs = 0;
    bool prev = false;
    for (auto [x, y] : path) {
        const bool cur = x >= 0 && y >= 0 && x < img.width() && y < img.height() && img.at(x, y);
        if (cur && !prev) ++runs;
        prev = cur;
    }
    return runs;
}

// Perimeter paths of the square of half-side `h` around (cx, cy), edge by
// edge in the order top, right, bottom, left, corners included in both.
inline std::vector<std::vector<std::pair<int, int>>> square_edges(int cx, int cy, int h) {
    std::vector<std::vector<std::pair<int, int>>> edges(4);
    for (int t = -h; t <= h; ++t) {
        edges[0].emplace_back(cx + t, cy - h);
        edges[1].emplace_back(cx + h, cy + t);
        edges[2].emplace_back(cx + t, cy + h);
        edges[3].emplace_back(cx - h, cy + t);
    }
    return edges;
}

// Morphology with an explicit square neighborhood; off-image reads as background.
inline pidgraph::BinaryImage erode(const pidgraph::BinaryImage& m, int side) {
    pidgraph::BinaryImage out(m.width(), m.height());
    const int r = side / 2;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            bool all = true;
            for (int dy = -r; dy <= r && all; ++dy)
                for (int dx = -r; dx <= r && all; ++dx) all = m.ink(x + dx, y + dy);
            out.set(x, y, all);
        }
    return out;
}

inline pidgraph::BinaryImage dilate(const pidgraph::BinaryImage& m, int side) {
    pidgraph::BinaryImage out(m.width(), m.height());
    const int r = side / 2;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            bool any = false;
            for (int dy = -r; dy <= r && !any; ++dy)
                for (int dx = -r; dx <= r && !any; ++dx) any = m.ink(x + dx, y + dy);
            out.set(x, y, any);
        }
    return out;
}

} // namespace oracle
