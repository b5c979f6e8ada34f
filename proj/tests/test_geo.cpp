#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "survey/geo.hpp"
#include "survey/rng.hpp"

using namespace survey;

namespace {

Detection burrow_at(double cx, double cy, double conf = 0.9) {
    return Detection(BBox(cx - 25, cy - 25, cx + 25, cy + 25), ClassId::burrow, conf);
}

double rect_point_dist(double x0, double y0, double x1, double y1, const Point& p) {
    const double dx = std::max({x0 - p.x, 0.0, p.x - x1});
    const double dy = std::max({y0 - p.y, 0.0, p.y - y1});
    return std::hypot(dx, dy);
}

}  // namespace

TEST_CASE("spatial index query matches a linear scan") {
    Rng rng(101);
    const double radius = 120.0;
    SpatialIndex idx(radius, 4000, 4000);
    std::vector<Point> points;
    for (int i = 0; i < 1000; ++i) {
        const Point p{rng.uniform(0, 4000), rng.uniform(0, 4000)};
        idx.insert(p, i);
        points.push_back(p);
    }
    CHECK(idx.size() == 1000);

    for (int q = 0; q < 200; ++q) {
        const Point probe{rng.uniform(-100, 4100), rng.uniform(-100, 4100)};
        auto hits = idx.query(probe);
        std::vector<int> got;
        for (const auto& [p, payload] : hits) got.push_back(payload);
        std::sort(got.begin(), got.end());

        std::vector<int> expect;
        for (int i = 0; i < 1000; ++i)
            if (std::hypot(points[i].x - probe.x, points[i].y - probe.y) <= radius)
                expect.push_back(i);
        CHECK(got == expect);
    }
}

TEST_CASE("near_rect matches a linear scan") {
    Rng rng(103);
    const double radius = 80.0;
    SpatialIndex idx(radius, 2000, 2000);
    std::vector<Point> points;
    for (int i = 0; i < 300; ++i) {
        const Point p{rng.uniform(0, 2000), rng.uniform(0, 2000)};
        idx.insert(p, i);
        points.push_back(p);
    }
    for (int q = 0; q < 300; ++q) {
        const double x0 = rng.uniform(0, 1800), y0 = rng.uniform(0, 1800);
        const double x1 = x0 + rng.uniform(10, 200), y1 = y0 + rng.uniform(10, 200);
        bool expect = false;
        for (const auto& p : points)
            if (rect_point_dist(x0, y0, x1, y1, p) <= radius) expect = true;
        CHECK(idx.near_rect(x0, y0, x1, y1) == expect);
    }
}

TEST_CASE("build_spatial_index unit conversion and filtering") {
    const GeoTransform geo{0.02, 0.0, 0.0};
    const std::vector<Detection> dets = {
        burrow_at(1000, 1000, 0.9),
        burrow_at(2000, 2000, 0.3),  // below confidence threshold
        Detection(BBox(500, 500, 530, 530), ClassId::prairie_dog, 0.99),  // wrong class
    };
    const SpatialIndex idx = build_spatial_index(dets, 0.5, geo, 15.2, 23040, 23040);
    CHECK(idx.size() == 1);
    // 15.2 m at 0.02 m/px = 760 px.
    CHECK(idx.radius_px() == doctest::Approx(760.0));
    CHECK(idx.query({1000 + 759, 1000}).size() == 1);
    CHECK(idx.query({1000 + 761, 1000}).empty());
}

TEST_CASE("geospatial_filter pool grows monotonically with radius") {
    const TilePlan plan = plan_tiles(8192, 8192, 512, 0.0);
    Rng rng(7);
    std::vector<Detection> dets;
    for (int i = 0; i < 12; ++i)
        dets.push_back(burrow_at(rng.uniform(500, 7700), rng.uniform(500, 7700)));
    const GeoTransform geo{0.02, 0.0, 0.0};

    std::size_t prev = 0;
    for (double radius_m : {2.0, 8.0, 15.2, 40.0}) {
        const SpatialIndex idx = build_spatial_index(dets, 0.5, geo, radius_m, 8192, 8192);
        const auto pool = geospatial_filter(plan, idx);
        CHECK(pool.size() >= prev);
        prev = pool.size();

        // Every pool tile really is near a burrow center (linear check).
        for (const auto& id : pool) {
            const TileRef* t = plan.find(id);
            REQUIRE(t != nullptr);
            bool near = false;
            for (const auto& d : dets) {
                const Point c{(d.bbox.x_min + d.bbox.x_max) / 2, (d.bbox.y_min + d.bbox.y_max) / 2};
                if (rect_point_dist(t->x0, t->y0, t->x0 + 512, t->y0 + 512, c) <=
                    radius_m / geo.gsd_m_per_px)
                    near = true;
            }
            CHECK(near);
        }
    }
    CHECK(prev > 0);
}

TEST_CASE("rank_tiles strategies") {
    const TilePlan plan = plan_tiles(5120, 512, 512, 0.0);  // 10 tiles, r0_c0..r0_c9
    std::set<std::string> pool;
    std::map<std::string, double> scores;
    for (int c = 0; c < 6; ++c) {
        const std::string id = "r0_c" + std::to_string(c);
        pool.insert(id);
        scores[id] = c * 0.1;
    }

    SUBCASE("score ranking is descending with tile_id tiebreak") {
        scores["r0_c1"] = 0.5;
        scores["r0_c5"] = 0.5;  // tie with c1: c1 first
        const AcquisitionBatch b = rank_tiles(pool, scores, Strategy::geo_tta, 3, 1, plan);
        REQUIRE(b.tiles.size() == 3);
        CHECK(b.tiles[0].first == "r0_c1");
        CHECK(b.tiles[1].first == "r0_c5");
        CHECK(b.tiles[2].first == "r0_c4");
    }
    SUBCASE("affine rescaling of scores preserves the ranking") {
        const AcquisitionBatch a = rank_tiles(pool, scores, Strategy::geo_uscore, 6, 1, plan);
        std::map<std::string, double> scaled;
        for (const auto& [id, s] : scores) scaled[id] = 3.0 * s + 7.0;
        const AcquisitionBatch b = rank_tiles(pool, scaled, Strategy::geo_uscore, 6, 1, plan);
        REQUIRE(a.tiles.size() == b.tiles.size());
        for (std::size_t i = 0; i < a.tiles.size(); ++i)
            CHECK(a.tiles[i].first == b.tiles[i].first);
    }
    SUBCASE("random draws from the whole plan, geo_random from the pool") {
        const AcquisitionBatch r = rank_tiles(pool, scores, Strategy::random, 10, 3, plan);
        CHECK(r.tiles.size() == 10);
        const AcquisitionBatch g = rank_tiles(pool, scores, Strategy::geo_random, 6, 3, plan);
        CHECK(g.tiles.size() == 6);
        for (const auto& [id, s] : g.tiles) CHECK(pool.count(id) == 1);
    }
    SUBCASE("deterministic under seed, different across seeds") {
        const AcquisitionBatch a = rank_tiles(pool, scores, Strategy::geo_random, 4, 11, plan);
        const AcquisitionBatch b = rank_tiles(pool, scores, Strategy::geo_random, 4, 11, plan);
        REQUIRE(a.tiles.size() == b.tiles.size());
        for (std::size_t i = 0; i < a.tiles.size(); ++i)
            CHECK(a.tiles[i].first == b.tiles[i].first);
    }
    SUBCASE("no repeats in any batch") {
        for (Strategy s : {Strategy::random, Strategy::geo_random, Strategy::geo_tta}) {
            const AcquisitionBatch b = rank_tiles(pool, scores, s, 6, 2, plan);
            std::set<std::string> seen;
            for (const auto& [id, sc] : b.tiles) CHECK(seen.insert(id).second);
        }
    }
    SUBCASE("oversized budget flags truncation") {
        const AcquisitionBatch b = rank_tiles(pool, scores, Strategy::geo_tta, 50, 1, plan);
        CHECK(b.truncated_pool);
        CHECK(b.tiles.size() == pool.size());
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(rank_tiles(pool, scores, Strategy::geo_tta, 0, 1, plan),
                        std::invalid_argument);
        std::map<std::string, double> missing = scores;
        missing.erase("r0_c2");
        CHECK_THROWS_AS(rank_tiles(pool, missing, Strategy::geo_uscore, 3, 1, plan),
                        std::invalid_argument);
    }
}

TEST_CASE("strategy names round trip") {
    for (Strategy s :
         {Strategy::random, Strategy::geo_random, Strategy::geo_tta, Strategy::geo_uscore})
        CHECK(strategy_from_name(strategy_name(s)) == s);
    CHECK_THROWS_AS(strategy_from_name("bogus"), std::invalid_argument);
}
