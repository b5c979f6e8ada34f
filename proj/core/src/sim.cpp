#include "survey/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "survey/rng.hpp"
#include "survey/uscore.hpp"

namespace survey {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Point clamp_point(Point p, int w, int h) {
    p.x = std::clamp(p.x, 0.0, static_cast<double>(w) - 1.0);
    p.y = std::clamp(p.y, 0.0, static_cast<double>(h) - 1.0);
    return p;
}

// Home tile of a box: the first plan tile (row-major) containing its center.
std::string home_tile(const BBox& b, const TilePlan& plan) {
    const auto tiles = tiles_containing({b.cx(), b.cy()}, plan);
    return tiles.front().tile_id;
}

}  // namespace

GroundTruth generate_colony(const ColonyConfig& cfg) {
    if (cfg.mosaic_w < cfg.tile_size || cfg.mosaic_h < cfg.tile_size)
        throw std::invalid_argument("generate_colony: mosaic smaller than tile");
    if (!(cfg.frac_near_burrow >= 0.0 && cfg.frac_near_burrow <= 1.0))
        throw std::invalid_argument("generate_colony: frac_near_burrow must lie in [0,1]");

    Rng root(cfg.seed);
    Rng burrow_rng = root.split("burrows");
    Rng animal_rng = root.split("animals");

    const double spread_px = cfg.cluster_spread_m / cfg.gsd_m_per_px;
    const double near_px = cfg.near_radius_m / cfg.gsd_m_per_px;

    GroundTruth gt;
    for (int c = 0; c < cfg.n_burrow_clusters; ++c) {
        const Point center{burrow_rng.uniform(0, cfg.mosaic_w), burrow_rng.uniform(0, cfg.mosaic_h)};
        const int count = burrow_rng.poisson(cfg.burrows_per_cluster_mean);
        for (int b = 0; b < count; ++b) {
            Point p{center.x + burrow_rng.gaussian(0.0, spread_px),
                    center.y + burrow_rng.gaussian(0.0, spread_px)};
            gt.burrows.push_back(clamp_point(p, cfg.mosaic_w, cfg.mosaic_h));
        }
    }

    for (int a = 0; a < cfg.n_animals; ++a) {
        const bool near = !gt.burrows.empty() && animal_rng.bernoulli(cfg.frac_near_burrow);
        Point p;
        if (near) {
            const Point& b = gt.burrows[animal_rng.index(gt.burrows.size())];
            // Uniform over the disc of radius near_px.
            const double r = near_px * std::sqrt(animal_rng.uniform());
            const double theta = animal_rng.uniform(0.0, 2.0 * M_PI);
            p = {b.x + r * std::cos(theta), b.y + r * std::sin(theta)};
        } else {
            p = {animal_rng.uniform(0, cfg.mosaic_w), animal_rng.uniform(0, cfg.mosaic_h)};
        }
        gt.animals.push_back(clamp_point(p, cfg.mosaic_w, cfg.mosaic_h));
    }
    return gt;
}

BBox object_box(const Point& center, double side, int mosaic_w, int mosaic_h) {
    const double half = side / 2.0;
    double x0 = std::clamp(center.x - half, 0.0, mosaic_w - side);
    double y0 = std::clamp(center.y - half, 0.0, mosaic_h - side);
    return BBox(x0, y0, x0 + side, y0 + side);
}

std::vector<Detection> ground_truth_detections(const GroundTruth& gt, const ColonyConfig& cfg) {
    const TilePlan plan = plan_tiles(cfg.mosaic_w, cfg.mosaic_h, cfg.tile_size, cfg.overlap_frac);
    std::vector<Detection> out;
    out.reserve(gt.animals.size() + gt.burrows.size());
    for (const auto& p : gt.animals) {
        const BBox b = object_box(p, kAnimalBoxPx, cfg.mosaic_w, cfg.mosaic_h);
        out.emplace_back(b, ClassId::prairie_dog, 1.0, std::nullopt, home_tile(b, plan));
    }
    for (const auto& p : gt.burrows) {
        const BBox b = object_box(p, kBurrowBoxPx, cfg.mosaic_w, cfg.mosaic_h);
        out.emplace_back(b, ClassId::burrow, 1.0, std::nullopt, home_tile(b, plan));
    }
    return out;
}

std::vector<std::vector<Detection>> simulate_detector(const GroundTruth& gt,
                                                      const ColonyConfig& cfg,
                                                      const DetectorNoise& noise, int passes,
                                                      std::uint64_t seed) {
    if (passes < 1) throw std::invalid_argument("simulate_detector: passes must be >= 1");

    Rng root(seed);
    Rng latent_rng = root.split("difficulty");

    struct Object {
        Point p;
        ClassId cls;
        double side;
        double detect_prob;
        double conf_mean;
    };
    std::vector<Object> objects;
    auto add_objects = [&](const std::vector<Point>& pts, ClassId cls, double side,
                           double miss_prob) {
        for (const auto& p : pts) {
            // Difficulty latent shifts both detectability and confidence,
            // correlating the passes.
            const double d = latent_rng.gaussian(0.0, 1.0);
            const double detect =
                clamp01(1.0 - miss_prob - noise.difficulty_mix * 0.3 * std::max(0.0, d));
            const double conf_mean =
                clamp01(noise.tp_conf_mean - noise.difficulty_mix * 0.2 * std::max(0.0, d));
            objects.push_back({p, cls, side, std::max(detect, 0.02), conf_mean});
        }
    };
    add_objects(gt.animals, ClassId::prairie_dog, kAnimalBoxPx, noise.miss_prob_pd);
    add_objects(gt.burrows, ClassId::burrow, kBurrowBoxPx, noise.miss_prob_burrow);

    const TilePlan plan = plan_tiles(cfg.mosaic_w, cfg.mosaic_h, cfg.tile_size, cfg.overlap_frac);

    std::vector<std::vector<Detection>> result(passes);
    for (int t = 0; t < passes; ++t) {
        Rng pass_rng = root.split(static_cast<std::uint64_t>(t) + 1000);
        auto& dets = result[t];

        for (const auto& obj : objects) {
            if (!pass_rng.bernoulli(obj.detect_prob)) continue;
            Point jittered{obj.p.x + pass_rng.gaussian(0.0, noise.bbox_jitter_px),
                           obj.p.y + pass_rng.gaussian(0.0, noise.bbox_jitter_px)};
            jittered = clamp_point(jittered, cfg.mosaic_w, cfg.mosaic_h);
            const double conf = clamp01(pass_rng.gaussian(obj.conf_mean, noise.tp_conf_std));
            const BBox box = object_box(jittered, obj.side, cfg.mosaic_w, cfg.mosaic_h);
            dets.emplace_back(box, obj.cls, conf, t, home_tile(box, plan));
        }

        // False positives, Poisson per tile per class.
        for (const auto& tile : plan.tiles) {
            auto emit_fps = [&](ClassId cls, double rate, double side) {
                const int n = pass_rng.poisson(rate);
                for (int i = 0; i < n; ++i) {
                    Point p{tile.x0 + pass_rng.uniform(0, cfg.tile_size),
                            tile.y0 + pass_rng.uniform(0, cfg.tile_size)};
                    const double conf =
                        clamp01(pass_rng.gaussian(noise.fp_conf_mean, noise.fp_conf_std));
                    const BBox box = object_box(p, side, cfg.mosaic_w, cfg.mosaic_h);
                    dets.emplace_back(box, cls, conf, t, home_tile(box, plan));
                }
            };
            emit_fps(ClassId::prairie_dog, noise.fp_rate_pd, kAnimalBoxPx);
            emit_fps(ClassId::burrow, noise.fp_rate_burrow, kBurrowBoxPx);
        }
    }
    return result;
}

namespace {

bool center_in_tile(const BBox& b, const TileRef& t, int tile_size) {
    return b.cx() >= t.x0 && b.cx() < t.x0 + tile_size && b.cy() >= t.y0 &&
           b.cy() < t.y0 + tile_size;
}

bool center_in_window(const BBox& b, const TileRef& t, int tile_size, int stride) {
    // 3x3 neighborhood of the tile, in mosaic coordinates.
    const double x0 = t.x0 - stride, y0 = t.y0 - stride;
    const double x1 = t.x0 + tile_size + stride, y1 = t.y0 + tile_size + stride;
    return b.cx() >= x0 && b.cx() < x1 && b.cy() >= y0 && b.cy() < y1;
}

}  // namespace

std::map<std::string, double> tta_tile_scores(const std::vector<std::vector<Detection>>& passes,
                                              const TilePlan& plan,
                                              const UncertaintyWeights& weights, double tau) {
    const int T = static_cast<int>(passes.size());
    const int stride = std::max(1, plan.stride());

    std::map<std::string, double> scores;
    for (const auto& tile : plan.tiles) {
        std::vector<Detection> window;
        for (const auto& pass : passes)
            for (const auto& d : pass)
                if (center_in_window(d.bbox, tile, plan.tile_size, stride)) {
                    Detection copy = d;
                    copy.tile_id = tile.tile_id;
                    window.push_back(std::move(copy));
                }

        auto clusters = cluster_detections(window, tau, T);
        // Count only clusters anchored in the central tile to avoid
        // double-counting across overlapping windows.
        std::erase_if(clusters, [&](const InstanceCluster& c) {
            return !center_in_tile(c.representative, tile, plan.tile_size);
        });
        scores[tile.tile_id] = tile_uncertainty(clusters, weights, tile.tile_id).score;
    }
    return scores;
}

std::map<std::string, double> uscore_tile_scores(const std::vector<Detection>& preds,
                                                 const GroundTruth& gt, const ColonyConfig& cfg,
                                                 const TilePlan& plan, double iou_threshold) {
    const std::vector<Detection> gt_dets = ground_truth_detections(gt, cfg);

    std::map<std::string, double> scores;
    for (const auto& tile : plan.tiles) {
        std::vector<Detection> tile_preds, tile_gts;
        for (const auto& d : preds)
            if (center_in_tile(d.bbox, tile, plan.tile_size)) tile_preds.push_back(d);
        for (const auto& d : gt_dets)
            if (center_in_tile(d.bbox, tile, plan.tile_size)) tile_gts.push_back(d);
        scores[tile.tile_id] = u_score(tile_preds, tile_gts, iou_threshold);
    }
    return scores;
}

SimulationRun run_pipeline(const ColonyConfig& cfg, const DetectorNoise& noise, int passes,
                           double burrow_conf_threshold) {
    SimulationRun run;
    run.gt = generate_colony(cfg);
    run.plan = plan_tiles(cfg.mosaic_w, cfg.mosaic_h, cfg.tile_size, cfg.overlap_frac);
    run.passes = simulate_detector(run.gt, cfg, noise, passes, cfg.seed ^ 0x5eedULL);

    const GeoTransform geo{cfg.gsd_m_per_px, 0.0, 0.0};
    const SpatialIndex index =
        build_spatial_index(run.passes.front(), burrow_conf_threshold, geo, cfg.near_radius_m,
                            cfg.mosaic_w, cfg.mosaic_h);
    run.pool = geospatial_filter(run.plan, index);
    run.tta_scores = tta_tile_scores(run.passes, run.plan, UncertaintyWeights{});
    run.uscores = uscore_tile_scores(run.passes.front(), run.gt, cfg, run.plan);
    return run;
}

StrategyMetrics evaluate_strategy(const SimulationRun& run, Strategy strategy, std::size_t k,
                                  std::uint64_t seed) {
    const auto& scores =
        strategy == Strategy::geo_uscore ? run.uscores : run.tta_scores;
    const AcquisitionBatch batch = rank_tiles(run.pool, scores, strategy, k, seed, run.plan);

    std::set<std::string> selected;
    for (const auto& [id, score] : batch.tiles) selected.insert(id);

    // Animal-bearing tiles and captured animals.
    std::set<std::string> bearing;
    int captured = 0;
    const int ts = run.plan.tile_size;
    for (const auto& a : run.gt.animals) {
        bool hit = false;
        for (const auto& t : run.plan.tiles) {
            if (a.x >= t.x0 && a.x < t.x0 + ts && a.y >= t.y0 && a.y < t.y0 + ts) {
                bearing.insert(t.tile_id);
                if (selected.count(t.tile_id)) hit = true;
            }
        }
        if (hit) ++captured;
    }
    std::size_t bearing_selected = 0;
    for (const auto& id : bearing)
        if (selected.count(id)) ++bearing_selected;

    StrategyMetrics m;
    m.strategy = strategy;
    m.budget = k;
    m.animals_captured = captured;
    m.animal_tile_recall =
        bearing.empty() ? 0.0 : static_cast<double>(bearing_selected) / bearing.size();
    m.pool_size_frac =
        run.plan.tiles.empty() ? 0.0 : static_cast<double>(run.pool.size()) / run.plan.tiles.size();
    m.selected = selected.size();
    return m;
}

}  // namespace survey
