#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace survey {

enum class ClassId { prairie_dog = 0, burrow = 1 };

const char* class_name(ClassId c);
ClassId class_from_name(const std::string& name);

// Axis-aligned box in continuous pixel coordinates, origin top-left.
struct BBox {
    double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;

    BBox() = default;
    BBox(double x0, double y0, double x1, double y1);

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    double cx() const { return 0.5 * (x_min + x_max); }
    double cy() const { return 0.5 * (y_min + y_max); }

    bool operator==(const BBox&) const = default;
};

struct Detection {
    BBox bbox;
    ClassId class_id = ClassId::prairie_dog;
    double confidence = 0.0;                // in [0,1]
    std::optional<int> pass_id;             // TTA pass provenance
    std::string tile_id;

    Detection() = default;
    Detection(BBox b, ClassId c, double conf,
              std::optional<int> pass = std::nullopt, std::string tile = {});
};

// Flat world mapping: meters = pixels * gsd, plus a world offset of pixel (0,0).
struct GeoTransform {
    double gsd_m_per_px = 0.02;
    double origin_x_m = 0.0;
    double origin_y_m = 0.0;

    void validate() const {
        if (!(gsd_m_per_px > 0.0)) throw std::invalid_argument("GeoTransform: gsd must be > 0");
    }
};

enum class TTAKind { identity, hflip, vflip, rot90, rot180, rot270, brightness };

// One member of the TTA family. Brightness leaves geometry untouched.
struct TTATransform {
    TTAKind kind = TTAKind::identity;
    double brightness_factor = 1.0;  // only meaningful for kind == brightness
    int tile_size = 512;
};

struct Point {
    double x = 0.0, y = 0.0;
};

// Intersection-over-union; 0 for disjoint boxes, symmetric.
double iou(const BBox& a, const BBox& b);

// Map a detection produced under transform t back to the canonical tile frame.
Detection remap_detection(const Detection& d, const TTATransform& t);

// Euclidean distance in meters between two pixel points.
double px_distance_m(const Point& p, const Point& q, const GeoTransform& g);

}  // namespace survey
