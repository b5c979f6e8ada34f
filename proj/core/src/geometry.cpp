#include "survey/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace survey {

const char* class_name(ClassId c) {
    return c == ClassId::prairie_dog ? "prairie_dog" : "burrow";
}

ClassId class_from_name(const std::string& name) {
    if (name == "prairie_dog") return ClassId::prairie_dog;
    if (name == "burrow") return ClassId::burrow;
    throw std::invalid_argument("unknown class name: " + name);
}

BBox::BBox(double x0, double y0, double x1, double y1)
    : x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
    if (!(std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1)))
        throw std::invalid_argument("BBox: coordinates must be finite");
    if (!(x_min < x_max && y_min < y_max))
        throw std::invalid_argument("BBox: requires x_min < x_max and y_min < y_max");
}

Detection::Detection(BBox b, ClassId c, double conf, std::optional<int> pass, std::string tile)
    : bbox(b), class_id(c), confidence(conf), pass_id(pass), tile_id(std::move(tile)) {
    if (!(conf >= 0.0 && conf <= 1.0))
        throw std::invalid_argument("Detection: confidence must lie in [0,1]");
}

double iou(const BBox& a, const BBox& b) {
    const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double inter = ix * iy;
    return inter / (a.area() + b.area() - inter);
}

Detection remap_detection(const Detection& d, const TTATransform& t) {
    const double s = static_cast<double>(t.tile_size);
    const BBox& b = d.bbox;
    if (b.x_min < 0.0 || b.y_min < 0.0 || b.x_max > s || b.y_max > s)
        throw std::invalid_argument("remap_detection: box outside tile bounds");

    Detection out = d;
    switch (t.kind) {
        case TTAKind::identity:
        case TTAKind::brightness:
            break;
        case TTAKind::hflip:
            out.bbox = BBox(s - b.x_max, b.y_min, s - b.x_min, b.y_max);
            break;
        case TTAKind::vflip:
            out.bbox = BBox(b.x_min, s - b.y_max, b.x_max, s - b.y_min);
            break;
        // Forward rot90 rotates the tile counter-clockwise, (x,y) -> (y, s-x);
        // remapping applies the inverse, (x,y) -> (s-y, x).
        case TTAKind::rot90:
            out.bbox = BBox(s - b.y_max, b.x_min, s - b.y_min, b.x_max);
            break;
        case TTAKind::rot180:
            out.bbox = BBox(s - b.x_max, s - b.y_max, s - b.x_min, s - b.y_min);
            break;
        case TTAKind::rot270:
            out.bbox = BBox(b.y_min, s - b.x_max, b.y_max, s - b.x_min);
            break;
    }
    return out;
}

double px_distance_m(const Point& p, const Point& q, const GeoTransform& g) {
    g.validate();
    return std::hypot(p.x - q.x, p.y - q.y) * g.gsd_m_per_px;
}

}  // namespace survey
