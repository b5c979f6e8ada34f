#include "survey/geo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "survey/rng.hpp"

namespace survey {

SpatialIndex::SpatialIndex(double radius_px, double mosaic_w, double mosaic_h)
    : radius_px_(radius_px) {
    (void)mosaic_w;
    (void)mosaic_h;
    if (!(radius_px > 0.0)) throw std::invalid_argument("SpatialIndex: radius must be > 0");
}

std::int64_t SpatialIndex::cell_of(double v) const {
    return static_cast<std::int64_t>(std::floor(v / radius_px_));
}

void SpatialIndex::insert(const Point& p, int payload) {
    buckets_[{cell_of(p.x), cell_of(p.y)}].emplace_back(p, payload);
    ++n_points_;
}

std::vector<std::pair<Point, int>> SpatialIndex::query(const Point& q) const {
    std::vector<std::pair<Point, int>> out;
    const std::int64_t cx = cell_of(q.x), cy = cell_of(q.y);
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            const auto it = buckets_.find({cx + dx, cy + dy});
            if (it == buckets_.end()) continue;
            for (const auto& [p, payload] : it->second)
                if (std::hypot(p.x - q.x, p.y - q.y) <= radius_px_)
                    out.emplace_back(p, payload);
        }
    }
    return out;
}

bool SpatialIndex::near_rect(double x0, double y0, double x1, double y1) const {
    // Cells overlapping the rectangle dilated by one ring.
    const std::int64_t cx0 = cell_of(x0) - 1, cx1 = cell_of(x1) + 1;
    const std::int64_t cy0 = cell_of(y0) - 1, cy1 = cell_of(y1) + 1;
    for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
        for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
            const auto it = buckets_.find({cx, cy});
            if (it == buckets_.end()) continue;
            for (const auto& [p, payload] : it->second) {
                const double dx = std::max({x0 - p.x, 0.0, p.x - x1});
                const double dy = std::max({y0 - p.y, 0.0, p.y - y1});
                if (std::hypot(dx, dy) <= radius_px_) return true;
            }
        }
    }
    return false;
}

SpatialIndex build_spatial_index(const std::vector<Detection>& detections, double conf_threshold,
                                 const GeoTransform& geo, double radius_m, double mosaic_w,
                                 double mosaic_h) {
    geo.validate();
    SpatialIndex index(radius_m / geo.gsd_m_per_px, mosaic_w, mosaic_h);
    int i = 0;
    for (const auto& d : detections) {
        if (d.class_id == ClassId::burrow && d.confidence >= conf_threshold)
            index.insert({d.bbox.cx(), d.bbox.cy()}, i);
        ++i;
    }
    return index;
}

std::set<std::string> geospatial_filter(const TilePlan& plan, const SpatialIndex& index) {
    std::set<std::string> pool;
    for (const auto& t : plan.tiles) {
        if (index.near_rect(t.x0, t.y0, t.x0 + plan.tile_size, t.y0 + plan.tile_size))
            pool.insert(t.tile_id);
    }
    return pool;
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::random: return "random";
        case Strategy::geo_random: return "geo_random";
        case Strategy::geo_tta: return "geo_tta";
        case Strategy::geo_uscore: return "geo_uscore";
    }
    return "random";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "random") return Strategy::random;
    if (name == "geo_random") return Strategy::geo_random;
    if (name == "geo_tta") return Strategy::geo_tta;
    if (name == "geo_uscore") return Strategy::geo_uscore;
    throw std::invalid_argument("unknown strategy: " + name);
}

namespace {

std::vector<std::string> sample_without_replacement(std::vector<std::string> ids, std::size_t k,
                                                    Rng& rng) {
    std::sort(ids.begin(), ids.end());  // independent of caller ordering
    const std::size_t take = std::min(k, ids.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.index(ids.size() - i);
        std::swap(ids[i], ids[j]);
    }
    ids.resize(take);
    return ids;
}

}  // namespace

AcquisitionBatch rank_tiles(const std::set<std::string>& pool,
                            const std::map<std::string, double>& scores, Strategy strategy,
                            std::size_t k, std::uint64_t seed, const TilePlan& plan) {
    if (k < 1) throw std::invalid_argument("rank_tiles: k must be >= 1");

    AcquisitionBatch batch;
    batch.strategy = strategy;
    batch.budget = k;
    batch.seed = seed;

    Rng rng(seed);
    switch (strategy) {
        case Strategy::random: {
            std::vector<std::string> ids;
            ids.reserve(plan.tiles.size());
            for (const auto& t : plan.tiles) ids.push_back(t.tile_id);
            batch.truncated_pool = k > ids.size();
            for (auto& id : sample_without_replacement(std::move(ids), k, rng))
                batch.tiles.emplace_back(std::move(id), 0.0);
            break;
        }
        case Strategy::geo_random: {
            std::vector<std::string> ids(pool.begin(), pool.end());
            batch.truncated_pool = k > ids.size();
            for (auto& id : sample_without_replacement(std::move(ids), k, rng))
                batch.tiles.emplace_back(std::move(id), 0.0);
            break;
        }
        case Strategy::geo_tta:
        case Strategy::geo_uscore: {
            std::vector<std::pair<std::string, double>> scored;
            scored.reserve(pool.size());
            for (const auto& id : pool) {
                const auto it = scores.find(id);
                if (it == scores.end())
                    throw std::invalid_argument("rank_tiles: missing score for tile " + id);
                scored.emplace_back(id, it->second);
            }
            std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
            batch.truncated_pool = k > scored.size();
            scored.resize(std::min(k, scored.size()));
            batch.tiles = std::move(scored);
            break;
        }
    }
    return batch;
}

}  // namespace survey
