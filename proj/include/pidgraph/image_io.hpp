#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "pidgraph/error.hpp"
#include "pidgraph/image.hpp"

namespace pidgraph {

struct Rgb {
    std::uint8_t r, g, b;
};

// Colour sheets reduce to integer luma (ITU-R 601 weights, rounded).
inline GrayImage read_gray(const std::string& path) {
    const cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (m.empty()) throw InputError("cannot read image " + path);
    if (m.depth() != CV_8U) throw InputError(path + ": only 8-bit images are supported");
    GrayImage out(m.cols, m.rows);
    const int ch = m.channels();
    for (int y = 0; y < m.rows; ++y) {
        const std::uint8_t* row = m.ptr<std::uint8_t>(y);
        for (int x = 0; x < m.cols; ++x) {
            const std::uint8_t* px = row + x * ch;
            int v;
            if (ch == 1 || ch == 2) {
                v = px[0];
            } else {
                const int b = px[0], g = px[1], r = px[2];
                v = (299 * r + 587 * g + 114 * b + 500) / 1000;
            }
            out.set(x, y, static_cast<std::uint8_t>(v));
        }
    }
    return out;
}

inline void write_png(const std::string& path, const cv::Mat& m) {
    bool ok = false;
    try {
        ok = cv::imwrite(path, m);
    } catch (const cv::Exception&) {
        ok = false;
    }
    if (!ok) throw RenderError("cannot write image " + path);
}

inline void write_gray(const std::string& path, const GrayImage& img) {
    cv::Mat m(img.height(), img.width(), CV_8UC1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) m.at<std::uint8_t>(y, x) = img.at(x, y);
    write_png(path, m);
}

// Interleaved RGB canvas for overlays.
class RgbImage {
public:
    explicit RgbImage(const GrayImage& base) : width_(base.width()), height_(base.height()), px_(width_ * height_) {
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x < width_; ++x) {
                const std::uint8_t v = base.at(x, y);
                px_[y * width_ + x] = {v, v, v};
            }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    void set(int x, int y, Rgb c) {
        if (x >= 0 && y >= 0 && x < width_ && y < height_) px_[y * width_ + x] = c;
    }
    Rgb at(int x, int y) const { return px_[y * width_ + x]; }

    void write(const std::string& path) const {
        cv::Mat m(height_, width_, CV_8UC3);
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x < width_; ++x) {
                const Rgb c = at(x, y);
                m.at<cv::Vec3b>(y, x) = {c.b, c.g, c.r};
            }
        write_png(path, m);
    }

private:
    int width_, height_;
    std::vector<Rgb> px_;
};

} // namespace pidgraph
