#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survey/geometry.hpp"
#include "survey/rng.hpp"

namespace survey {

struct TileRef {
    std::string tile_id;  // "r{row}_c{col}", stable across runs
    int x0 = 0;
    int y0 = 0;
    std::optional<bool> has_annotations;
};

// Deterministic row-major tiling of an orthomosaic. Pure coordinate
// arithmetic; pixel data is never touched here.
struct TilePlan {
    int mosaic_w = 0;
    int mosaic_h = 0;
    int tile_size = 512;
    double overlap_frac = 0.30;
    std::vector<TileRef> tiles;

    int stride() const {
        return static_cast<int>(tile_size * (1.0 - overlap_frac));
    }
    const TileRef* find(const std::string& tile_id) const;
};

// Offsets 0, stride, 2*stride, ...; the final offset per axis is clamped to
// mosaic_dim - tile_size so coverage is complete. The last overlap may
// therefore exceed the nominal fraction.
TilePlan plan_tiles(int mosaic_w, int mosaic_h, int tile_size = 512,
                    double overlap_frac = 0.30);

// All tiles whose extent contains the point. Nonempty by the coverage
// invariant; throws if the point lies outside the mosaic.
std::vector<TileRef> tiles_containing(const Point& p, const TilePlan& plan);

// Uniform sample, without replacement, of `annotated_count` tiles with
// has_annotations == false. Reproducible under seed.
std::vector<TileRef> sample_background_tiles(const TilePlan& plan,
                                             std::size_t annotated_count,
                                             std::uint64_t seed);

}  // namespace survey
