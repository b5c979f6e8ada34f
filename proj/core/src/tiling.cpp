#include "survey/tiling.hpp"

#include <algorithm>
#include <stdexcept>

namespace survey {

const TileRef* TilePlan::find(const std::string& tile_id) const {
    for (const auto& t : tiles)
        if (t.tile_id == tile_id) return &t;
    return nullptr;
}

namespace {

std::vector<int> axis_offsets(int mosaic_dim, int tile_size, int stride) {
    std::vector<int> offsets;
    const int last = mosaic_dim - tile_size;
    for (int off = 0;; off += stride) {
        if (off >= last) {
            offsets.push_back(last);  // clamp so coverage reaches the edge
            break;
        }
        offsets.push_back(off);
        if (stride == 0) break;  // unreachable for overlap_frac < 1, guarded anyway
    }
    return offsets;
}

}  // namespace

TilePlan plan_tiles(int mosaic_w, int mosaic_h, int tile_size, double overlap_frac) {
    if (mosaic_w < tile_size || mosaic_h < tile_size)
        throw std::invalid_argument("plan_tiles: mosaic smaller than tile");
    if (!(overlap_frac >= 0.0 && overlap_frac < 1.0))
        throw std::invalid_argument("plan_tiles: overlap_frac must lie in [0,1)");
    if (tile_size < 1) throw std::invalid_argument("plan_tiles: tile_size must be positive");

    TilePlan plan;
    plan.mosaic_w = mosaic_w;
    plan.mosaic_h = mosaic_h;
    plan.tile_size = tile_size;
    plan.overlap_frac = overlap_frac;

    const int stride = std::max(1, plan.stride());
    const auto xs = axis_offsets(mosaic_w, tile_size, stride);
    const auto ys = axis_offsets(mosaic_h, tile_size, stride);

    plan.tiles.reserve(xs.size() * ys.size());
    for (std::size_t r = 0; r < ys.size(); ++r)
        for (std::size_t c = 0; c < xs.size(); ++c)
            plan.tiles.push_back(
                {"r" + std::to_string(r) + "_c" + std::to_string(c), xs[c], ys[r], std::nullopt});
    return plan;
}

std::vector<TileRef> tiles_containing(const Point& p, const TilePlan& plan) {
    if (p.x < 0 || p.y < 0 || p.x >= plan.mosaic_w || p.y >= plan.mosaic_h)
        throw std::invalid_argument("tiles_containing: point outside mosaic");
    std::vector<TileRef> out;
    for (const auto& t : plan.tiles) {
        if (p.x >= t.x0 && p.x < t.x0 + plan.tile_size && p.y >= t.y0 &&
            p.y < t.y0 + plan.tile_size)
            out.push_back(t);
    }
    return out;
}

std::vector<TileRef> sample_background_tiles(const TilePlan& plan, std::size_t annotated_count,
                                             std::uint64_t seed) {
    std::vector<TileRef> background;
    for (const auto& t : plan.tiles) {
        if (!t.has_annotations.has_value())
            throw std::invalid_argument("sample_background_tiles: has_annotations not populated");
        if (!*t.has_annotations) background.push_back(t);
    }
    if (background.size() < annotated_count)
        throw std::invalid_argument("sample_background_tiles: insufficient background tiles");

    // Partial Fisher-Yates over the background list.
    Rng rng(seed);
    std::vector<TileRef> out;
    out.reserve(annotated_count);
    for (std::size_t i = 0; i < annotated_count; ++i) {
        const std::size_t j = i + rng.index(background.size() - i);
        std::swap(background[i], background[j]);
        out.push_back(background[i]);
    }
    return out;
}

}  // namespace survey
