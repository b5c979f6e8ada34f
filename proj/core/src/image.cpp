#include "survey/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace survey {

RgbImage::RgbImage(int w, int h, double r, double g, double b)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {
    if (w < 1 || h < 1) throw std::invalid_argument("RgbImage: dimensions must be >= 1");
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }
}

std::size_t BoolMask::count() const {
    return static_cast<std::size_t>(
        std::accumulate(values.begin(), values.end(), std::size_t{0}));
}

Hsv rgb_to_hsv(double r, double g, double b) {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    Hsv out;
    out.v = mx;
    out.s = mx > 0.0 ? d / mx : 0.0;
    if (d <= 0.0) {
        out.h = 0.0;
    } else if (mx == r) {
        out.h = 60.0 * std::fmod((g - b) / d, 6.0);
    } else if (mx == g) {
        out.h = 60.0 * ((b - r) / d + 2.0);
    } else {
        out.h = 60.0 * ((r - g) / d + 4.0);
    }
    if (out.h < 0.0) out.h += 360.0;
    return out;
}

void hsv_to_rgb(const Hsv& hsv, double& r, double& g, double& b) {
    const double c = hsv.v * hsv.s;
    const double hp = hsv.h / 60.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r1 = 0, g1 = 0, b1 = 0;
    if (hp < 1)      { r1 = c; g1 = x; }
    else if (hp < 2) { r1 = x; g1 = c; }
    else if (hp < 3) { g1 = c; b1 = x; }
    else if (hp < 4) { g1 = x; b1 = c; }
    else if (hp < 5) { r1 = x; b1 = c; }
    else             { r1 = c; b1 = x; }
    const double m = hsv.v - c;
    r = r1 + m;
    g = g1 + m;
    b = b1 + m;
}

namespace {
std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}
}  // namespace

RgbImage load_png(const std::string& path) {
    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    if (bgr.empty()) throw std::runtime_error("load_png: cannot read " + path);
    RgbImage img(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            img.at(x, y, 0) = row[x][2] / 255.0;
            img.at(x, y, 1) = row[x][1] / 255.0;
            img.at(x, y, 2) = row[x][0] / 255.0;
        }
    }
    return img;
}

void save_png(const RgbImage& img, const std::string& path) {
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width; ++x) {
            row[x][2] = to_byte(img.at(x, y, 0));
            row[x][1] = to_byte(img.at(x, y, 1));
            row[x][0] = to_byte(img.at(x, y, 2));
        }
    }
    if (!cv::imwrite(path, bgr)) throw std::runtime_error("save_png: cannot write " + path);
}

BoolMask load_mask_png(const std::string& path) {
    cv::Mat gray = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (gray.empty()) throw std::runtime_error("load_mask_png: cannot read " + path);
    BoolMask mask(gray.cols, gray.rows);
    for (int y = 0; y < gray.rows; ++y)
        for (int x = 0; x < gray.cols; ++x) mask.set(x, y, gray.at<std::uint8_t>(y, x) != 0);
    return mask;
}

void save_mask_png(const BoolMask& mask, const std::string& path) {
    cv::Mat gray(mask.height, mask.width, CV_8UC1);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            gray.at<std::uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
    if (!cv::imwrite(path, gray)) throw std::runtime_error("save_mask_png: cannot write " + path);
}

}  // namespace survey
