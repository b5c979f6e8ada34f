#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "survey/geometry.hpp"

namespace survey {

// 3-channel RGB raster, values in [0,1], row-major.
struct RgbImage {
    int width = 0, height = 0;
    std::vector<double> pixels;  // 3 * width * height, interleaved RGB

    RgbImage() = default;
    RgbImage(int w, int h, double r = 0.0, double g = 0.0, double b = 0.0);

    double& at(int x, int y, int ch) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + ch];
    }
    double at(int x, int y, int ch) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + ch];
    }
};

enum class Habitat : std::uint8_t { dirt = 0, grass = 1 };

struct ContextMap {
    int width = 0, height = 0;
    std::vector<Habitat> labels;

    Habitat at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

struct BoolMask {
    int width = 0, height = 0;
    std::vector<std::uint8_t> values;

    BoolMask() = default;
    BoolMask(int w, int h, bool fill = false)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}
    bool at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { values[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    std::size_t count() const;
};

enum class PatchSource { labeled, false_positive, false_negative };

struct Patch {
    RgbImage image;
    BoolMask mask;
    PatchSource source_kind = PatchSource::labeled;
    ClassId class_id = ClassId::prairie_dog;
};

// HSV with hue in degrees [0,360), saturation and value in [0,1].
struct Hsv {
    double h = 0.0, s = 0.0, v = 0.0;
};

Hsv rgb_to_hsv(double r, double g, double b);
void hsv_to_rgb(const Hsv& hsv, double& r, double& g, double& b);

// 8-bit PNG I/O; [0,1] maps linearly to [0,255].
RgbImage load_png(const std::string& path);
void save_png(const RgbImage& img, const std::string& path);
BoolMask load_mask_png(const std::string& path);  // nonzero -> true
void save_mask_png(const BoolMask& mask, const std::string& path);

}  // namespace survey
