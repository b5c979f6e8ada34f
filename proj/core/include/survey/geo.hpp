#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "survey/geometry.hpp"
#include "survey/tiling.hpp"

namespace survey {

// Uniform-grid point index with a fixed query radius (cell size = radius).
class SpatialIndex {
public:
    SpatialIndex() = default;
    SpatialIndex(double radius_px, double mosaic_w, double mosaic_h);

    void insert(const Point& p, int payload);
    // All (point, payload) entries within radius_px of q.
    std::vector<std::pair<Point, int>> query(const Point& q) const;
    // Whether any indexed point lies within radius_px of the axis-aligned
    // rectangle [x0,x1] x [y0,y1].
    bool near_rect(double x0, double y0, double x1, double y1) const;

    double radius_px() const { return radius_px_; }
    std::size_t size() const { return n_points_; }

private:
    std::int64_t cell_of(double v) const;

    double radius_px_ = 0.0;
    std::size_t n_points_ = 0;
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::pair<Point, int>>> buckets_;
};

// Index burrow-class detections with confidence >= conf_threshold by box
// center; radius_m converts through the geo transform.
SpatialIndex build_spatial_index(const std::vector<Detection>& detections,
                                 double conf_threshold, const GeoTransform& geo,
                                 double radius_m, double mosaic_w, double mosaic_h);

// Candidate pool: tiles whose rectangle comes within the index radius of any
// indexed burrow center.
std::set<std::string> geospatial_filter(const TilePlan& plan, const SpatialIndex& index);

enum class Strategy { random, geo_random, geo_tta, geo_uscore };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct AcquisitionBatch {
    Strategy strategy = Strategy::random;
    std::size_t budget = 0;
    std::vector<std::pair<std::string, double>> tiles;  // ranked (tile_id, score)
    std::uint64_t seed = 0;
    bool truncated_pool = false;  // k exceeded the pool size
};

// Budget-k selection. `random` samples uniformly from the whole plan,
// `geo_random` from the pool; the score-based strategies rank the pool by
// descending score with ties broken by ascending tile_id.
AcquisitionBatch rank_tiles(const std::set<std::string>& pool,
                            const std::map<std::string, double>& scores, Strategy strategy,
                            std::size_t k, std::uint64_t seed, const TilePlan& plan);

}  // namespace survey
