#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "pidgraph/error.hpp"
#include "pidgraph/geometry.hpp"
#include "pidgraph/image.hpp"

namespace pidgraph {

struct HoughParams {
    double rho = 1.0;       // pixels
    double theta = 1.0;     // degrees
    int votes = 50;
    double min_length = 50.0;
    int max_gap = 4;
    std::uint32_t seed = 0;

    void validate() const {
        if (!(rho > 0) || !(theta > 0) || votes < 1 || !(min_length > 0) || max_gap < 1) {
            throw ParameterError("Hough parameters must all be positive");
        }
    }
};

struct RawSegment {
    Point p;
    Point q;
};

// Progressive probabilistic Hough transform. Points vote in a seeded random
// order; once a bin reaches `votes`, the corridor along its line is walked
// from the voting point in both directions, tolerating up to `max_gap`
// missing pixels. Corridor pixels of an accepted line stop voting and have
// their votes withdrawn. The walk reads the original image with one pixel of
// perpendicular slack, so a stroke shared with an earlier line still counts.
inline std::vector<RawSegment> probabilistic_hough(const BinaryImage& image,
                                                   const HoughParams& params = {}) {
    params.validate();
    const int w = image.width();
    const int h = image.height();
    const double theta_step = params.theta * std::numbers::pi / 180.0;
    const int num_angle = static_cast<int>(std::lround(std::numbers::pi / theta_step));
    const int num_rho = static_cast<int>(std::lround(((w + h) * 2 + 1) / params.rho));
    const double irho = 1.0 / params.rho;

    std::vector<double> cos_t(num_angle), sin_t(num_angle);
    for (int n = 0; n < num_angle; ++n) {
        cos_t[n] = std::cos(n * theta_step) * irho;
        sin_t[n] = std::sin(n * theta_step) * irho;
    }

    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
    std::vector<std::pair<int, int>> points;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (image.at(x, y)) {
                mask[static_cast<std::size_t>(y) * w + x] = 1;
                points.emplace_back(x, y);
            }

    // Fisher-Yates with raw engine output keeps the order identical across
    // standard library implementations.
    std::mt19937 rng(params.seed);
    for (std::size_t i = points.size(); i > 1; --i) {
        const std::size_t j = rng() % i;
        std::swap(points[i - 1], points[j]);
    }

    std::vector<int> acc(static_cast<std::size_t>(num_angle) * num_rho, 0);
    std::vector<std::uint8_t> voted(mask.size(), 0);
    auto vote = [&](int x, int y, int delta) {
        for (int n = 0; n < num_angle; ++n) {
            int r = static_cast<int>(std::lround(x * cos_t[n] + y * sin_t[n]));
            r += (num_rho - 1) / 2;
            acc[static_cast<std::size_t>(n) * num_rho + r] += delta;
        }
    };
    auto present = [&](int x, int y, bool along_x) {
        for (int d = -1; d <= 1; ++d) {
            const int px = along_x ? x : x + d;
            const int py = along_x ? y + d : y;
            if (image.ink(px, py)) return true;
        }
        return false;
    };

    std::vector<RawSegment> lines;
    constexpr int kShift = 16;
    for (auto [x0, y0] : points) {
        if (!mask[static_cast<std::size_t>(y0) * w + x0]) continue;
        voted[static_cast<std::size_t>(y0) * w + x0] = 1;

        int best = params.votes - 1;
        int best_n = -1;
        for (int n = 0; n < num_angle; ++n) {
            int r = static_cast<int>(std::lround(x0 * cos_t[n] + y0 * sin_t[n]));
            r += (num_rho - 1) / 2;
            const int v = ++acc[static_cast<std::size_t>(n) * num_rho + r];
            if (v > best) {
                best = v;
                best_n = n;
            }
        }
        if (best_n < 0) continue;

        // Direction along the line for the winning normal angle.
        const double a = -sin_t[best_n] * params.rho;
        const double b = cos_t[best_n] * params.rho;
        const bool along_x = std::abs(a) > std::abs(b);
        long long xs, ys, dx0, dy0;
        if (along_x) {
            dx0 = a > 0 ? 1 : -1;
            dy0 = static_cast<long long>(std::llround(b * (1LL << kShift) / std::abs(a)));
            xs = x0;
            ys = (static_cast<long long>(y0) << kShift) + (1LL << (kShift - 1));
        } else {
            dy0 = b > 0 ? 1 : -1;
            dx0 = static_cast<long long>(std::llround(a * (1LL << kShift) / std::abs(b)));
            ys = y0;
            xs = (static_cast<long long>(x0) << kShift) + (1LL << (kShift - 1));
        }
        auto pixel = [&](long long x, long long y) -> std::pair<int, int> {
            return along_x ? std::pair<int, int>{int(x), int(y >> kShift)}
                           : std::pair<int, int>{int(x >> kShift), int(y)};
        };

        std::pair<int, int> ends[2] = {{x0, y0}, {x0, y0}};
        for (int k = 0; k < 2; ++k) {
            long long x = xs, y = ys, dx = k ? -dx0 : dx0, dy = k ? -dy0 : dy0;
            int gap = 0;
            for (;; x += dx, y += dy) {
                auto [px, py] = pixel(x, y);
                if (px < 0 || px >= w || py < 0 || py >= h) break;
                if (present(px, py, along_x)) {
                    gap = 0;
                    ends[k] = {px, py};
                } else if (++gap > params.max_gap) {
                    break;
                }
            }
        }

        const double len = std::hypot(ends[1].first - ends[0].first, ends[1].second - ends[0].second);
        const bool good = len >= params.min_length;

        for (int k = 0; k < 2; ++k) {
            long long x = xs, y = ys, dx = k ? -dx0 : dx0, dy = k ? -dy0 : dy0;
            for (;; x += dx, y += dy) {
                auto [px, py] = pixel(x, y);
                if (px < 0 || px >= w || py < 0 || py >= h) break;
                for (int d = -1; d <= 1; ++d) {
                    if (!good && d != 0) continue;
                    const int qx = along_x ? px : px + d;
                    const int qy = along_x ? py + d : py;
                    if (qx < 0 || qx >= w || qy < 0 || qy >= h) continue;
                    const std::size_t i = static_cast<std::size_t>(qy) * w + qx;
                    if (mask[i]) {
                        if (good && voted[i]) vote(qx, qy, -1);
                        mask[i] = 0;
                    }
                }
                if (px == ends[k].first && py == ends[k].second) break;
            }
        }
        if (good) {
            lines.push_back({{double(ends[0].first), double(ends[0].second)},
                             {double(ends[1].first), double(ends[1].second)}});
        }
    }
    return lines;
}

} // namespace pidgraph
