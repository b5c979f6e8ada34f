#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "survey/sim.hpp"

using namespace survey;

namespace {

ColonyConfig small_config() {
    ColonyConfig cfg;
    cfg.mosaic_w = 5120;
    cfg.mosaic_h = 5120;
    cfg.n_burrow_clusters = 3;
    cfg.burrows_per_cluster_mean = 12.0;
    cfg.n_animals = 20;
    cfg.seed = 9;
    return cfg;
}

double min_dist_to(const std::vector<Point>& pts, const Point& p) {
    double best = 1e18;
    for (const auto& q : pts) best = std::min(best, std::hypot(q.x - p.x, q.y - p.y));
    return best;
}

}  // namespace

TEST_CASE("generate_colony determinism and bounds") {
    const ColonyConfig cfg = small_config();
    const GroundTruth a = generate_colony(cfg);
    const GroundTruth b = generate_colony(cfg);
    CHECK(a.burrows.size() == b.burrows.size());
    CHECK(a.animals.size() == b.animals.size());
    for (std::size_t i = 0; i < a.burrows.size(); ++i) {
        CHECK(a.burrows[i].x == b.burrows[i].x);
        CHECK(a.burrows[i].y == b.burrows[i].y);
    }
    CHECK(static_cast<int>(a.animals.size()) == cfg.n_animals);
    CHECK(a.burrows.size() > 0);
    for (const auto& p : a.burrows) {
        CHECK(p.x >= 0);
        CHECK(p.x < cfg.mosaic_w);
        CHECK(p.y >= 0);
        CHECK(p.y < cfg.mosaic_h);
    }

    ColonyConfig other = cfg;
    other.seed = 10;
    const GroundTruth c = generate_colony(other);
    bool differs = c.burrows.size() != a.burrows.size();
    for (std::size_t i = 0; !differs && i < c.burrows.size(); ++i)
        differs = c.burrows[i].x != a.burrows[i].x;
    CHECK(differs);
}

TEST_CASE("animals stay within the burrow radius when frac_near_burrow is 1") {
    ColonyConfig cfg = small_config();
    cfg.frac_near_burrow = 1.0;
    const GroundTruth gt = generate_colony(cfg);
    const double radius_px = cfg.near_radius_m / cfg.gsd_m_per_px;
    for (const auto& a : gt.animals)
        CHECK(min_dist_to(gt.burrows, a) <= radius_px + 1e-6);
}

TEST_CASE("near-burrow fraction matches the configured probability") {
    ColonyConfig cfg = small_config();
    cfg.n_animals = 400;
    const double radius_px = cfg.near_radius_m / cfg.gsd_m_per_px;
    int near = 0, total = 0;
    for (int seed = 0; seed < 25; ++seed) {
        cfg.seed = 100 + seed;
        const GroundTruth gt = generate_colony(cfg);
        for (const auto& a : gt.animals) {
            ++total;
            if (min_dist_to(gt.burrows, a) <= radius_px) ++near;
        }
    }
    const double frac = static_cast<double>(near) / total;
    // Far animals are uniform over the mosaic and can land near a burrow by
    // chance, so the observed fraction sits at or slightly above 0.95.
    CHECK(frac > 0.94);
    CHECK(frac < 0.99);
}

TEST_CASE("object_box slides inside the mosaic without shrinking") {
    const BBox b = object_box({10, 10}, 50, 5120, 5120);
    CHECK(b.x_min == 0.0);
    CHECK(b.x_max == doctest::Approx(50.0));
    CHECK(b.width() == doctest::Approx(50.0));
    const BBox c = object_box({100, 100}, 30, 5120, 5120);
    CHECK(c.x_min == doctest::Approx(85.0));
    CHECK(c.x_max == doctest::Approx(115.0));
}

TEST_CASE("simulate_detector noise behavior") {
    const ColonyConfig cfg = small_config();
    const GroundTruth gt = generate_colony(cfg);

    SUBCASE("zero noise reproduces the ground truth exactly") {
        DetectorNoise noise;
        noise.miss_prob_pd = 0.0;
        noise.miss_prob_burrow = 0.0;
        noise.fp_rate_pd = 0.0;
        noise.fp_rate_burrow = 0.0;
        noise.tp_conf_std = 0.0;
        noise.bbox_jitter_px = 0.0;
        noise.difficulty_mix = 0.0;
        const auto passes = simulate_detector(gt, cfg, noise, 2, 5);
        REQUIRE(passes.size() == 2);
        for (const auto& pass : passes) {
            CHECK(pass.size() == gt.burrows.size() + gt.animals.size());
            for (const auto& d : pass) CHECK(d.confidence == doctest::Approx(0.8));
        }
    }
    SUBCASE("miss probability thins detections") {
        DetectorNoise noise;
        noise.fp_rate_pd = 0.0;
        noise.fp_rate_burrow = 0.0;
        noise.difficulty_mix = 0.0;
        int burrow_hits = 0, pd_hits = 0;
        const int passes_n = 40;
        const auto passes = simulate_detector(gt, cfg, noise, passes_n, 5);
        for (const auto& pass : passes)
            for (const auto& d : pass)
                (d.class_id == ClassId::burrow ? burrow_hits : pd_hits)++;
        const double burrow_rate =
            static_cast<double>(burrow_hits) / (passes_n * gt.burrows.size());
        const double pd_rate = static_cast<double>(pd_hits) / (passes_n * gt.animals.size());
        CHECK(burrow_rate == doctest::Approx(0.90).epsilon(0.05));
        CHECK(pd_rate == doctest::Approx(0.75).epsilon(0.08));
    }
    SUBCASE("false positive count follows the configured rate") {
        const ColonyConfig c = small_config();
        GroundTruth empty_gt;  // FPs only
        DetectorNoise noise;
        noise.fp_rate_pd = 0.1;
        noise.fp_rate_burrow = 0.0;
        const TilePlan plan = plan_tiles(c.mosaic_w, c.mosaic_h, c.tile_size, c.overlap_frac);
        const auto passes = simulate_detector(empty_gt, c, noise, 10, 5);
        double total = 0;
        for (const auto& pass : passes) total += pass.size();
        const double per_tile_per_pass = total / (10.0 * plan.tiles.size());
        CHECK(per_tile_per_pass == doctest::Approx(0.1).epsilon(0.15));
    }
    SUBCASE("deterministic under seed") {
        const DetectorNoise noise;
        const auto a = simulate_detector(gt, cfg, noise, 3, 77);
        const auto b = simulate_detector(gt, cfg, noise, 3, 77);
        REQUIRE(a.size() == b.size());
        for (std::size_t p = 0; p < a.size(); ++p) {
            REQUIRE(a[p].size() == b[p].size());
            for (std::size_t i = 0; i < a[p].size(); ++i) {
                CHECK(a[p][i].bbox == b[p][i].bbox);
                CHECK(a[p][i].confidence == b[p][i].confidence);
            }
        }
    }
}

TEST_CASE("tile score maps cover the mosaic plan") {
    const ColonyConfig cfg = small_config();
    const DetectorNoise noise;
    const SimulationRun run = run_pipeline(cfg, noise, 5);

    SUBCASE("scores are nonnegative and keyed by plan tiles") {
        for (const auto& [id, s] : run.tta_scores) {
            CHECK(run.plan.find(id) != nullptr);
            CHECK(s >= 0.0);
        }
        for (const auto& [id, s] : run.uscores) {
            CHECK(run.plan.find(id) != nullptr);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0 + 1e-12);
        }
        CHECK(run.tta_scores.size() == run.plan.tiles.size());
        CHECK(run.uscores.size() == run.plan.tiles.size());
    }
    SUBCASE("pool tiles are plan tiles") {
        CHECK(!run.pool.empty());
        for (const auto& id : run.pool) CHECK(run.plan.find(id) != nullptr);
        CHECK(run.pool.size() < run.plan.tiles.size());
    }
}

TEST_CASE("evaluate_strategy basic sanity") {
    const ColonyConfig cfg = small_config();
    const DetectorNoise noise;
    const SimulationRun run = run_pipeline(cfg, noise, 5);
    const std::size_t k = 20;

    for (Strategy s :
         {Strategy::random, Strategy::geo_random, Strategy::geo_tta, Strategy::geo_uscore}) {
        const StrategyMetrics m = evaluate_strategy(run, s, k, 3);
        CHECK(m.strategy == s);
        CHECK(m.selected <= k);
        CHECK(m.animal_tile_recall >= 0.0);
        CHECK(m.animal_tile_recall <= 1.0);
        CHECK(m.animals_captured >= 0);
        CHECK(m.animals_captured <= cfg.n_animals);
        CHECK(m.pool_size_frac ==
              doctest::Approx(static_cast<double>(run.pool.size()) / run.plan.tiles.size()));
    }

    // Selecting every tile captures every animal.
    const StrategyMetrics all =
        evaluate_strategy(run, Strategy::random, run.plan.tiles.size(), 3);
    CHECK(all.animals_captured == cfg.n_animals);
    CHECK(all.animal_tile_recall == doctest::Approx(1.0));
}
