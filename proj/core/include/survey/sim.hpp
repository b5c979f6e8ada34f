#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "survey/geo.hpp"
#include "survey/geometry.hpp"
#include "survey/tiling.hpp"
#include "survey/tta.hpp"

namespace survey {

// Synthetic colony layout. Burrows form a cluster point process; most
// animals sit near burrows.
struct ColonyConfig {
    int mosaic_w = 23040;
    int mosaic_h = 23040;
    double gsd_m_per_px = 0.02;
    int tile_size = 512;
    double overlap_frac = 0.0;  // desk-scale default: ~2000 disjoint tiles
    int n_burrow_clusters = 10;
    double burrows_per_cluster_mean = 38.0;
    double cluster_spread_m = 15.0;
    int n_animals = 100;
    double frac_near_burrow = 0.95;
    double near_radius_m = 15.2;
    std::uint64_t seed = 1;
};

struct GroundTruth {
    std::vector<Point> burrows;
    std::vector<Point> animals;
};

// Simple oracle detector: per-pass misses, box jitter, confidence noise and
// per-tile Poisson false positives.
struct DetectorNoise {
    double miss_prob_pd = 0.25;
    double miss_prob_burrow = 0.10;
    double fp_rate_pd = 0.02;      // expected FPs per tile per class per pass
    double fp_rate_burrow = 0.02;
    double tp_conf_mean = 0.80;
    double tp_conf_std = 0.10;
    double fp_conf_mean = 0.40;
    double fp_conf_std = 0.15;
    double bbox_jitter_px = 2.0;
    // Per-object difficulty latent shared across passes; 0 makes passes
    // independent, 1 makes some objects consistently hard.
    double difficulty_mix = 0.7;
};

// Object footprint in pixels used when turning ground-truth points into boxes.
constexpr double kAnimalBoxPx = 30.0;
constexpr double kBurrowBoxPx = 50.0;

GroundTruth generate_colony(const ColonyConfig& cfg);

BBox object_box(const Point& center, double side, int mosaic_w, int mosaic_h);

// Ground-truth objects as mosaic-frame detections with confidence 1.
std::vector<Detection> ground_truth_detections(const GroundTruth& gt, const ColonyConfig& cfg);

// T passes of noisy detections in the mosaic frame, deterministic under seed.
std::vector<std::vector<Detection>> simulate_detector(const GroundTruth& gt,
                                                      const ColonyConfig& cfg,
                                                      const DetectorNoise& noise, int passes,
                                                      std::uint64_t seed);

// TTA tile scores: per tile, cluster the detections of its 3x3 window and
// aggregate the clusters whose representative center falls inside the tile.
std::map<std::string, double> tta_tile_scores(const std::vector<std::vector<Detection>>& passes,
                                              const TilePlan& plan,
                                              const UncertaintyWeights& weights, double tau = 0.5);

// Oracle error scores from single-pass predictions against ground truth.
std::map<std::string, double> uscore_tile_scores(const std::vector<Detection>& preds,
                                                 const GroundTruth& gt, const ColonyConfig& cfg,
                                                 const TilePlan& plan, double iou_threshold = 0.5);

struct StrategyMetrics {
    Strategy strategy = Strategy::random;
    std::size_t budget = 0;
    double animal_tile_recall = 0.0;  // fraction of animal-bearing tiles selected
    int animals_captured = 0;         // animals inside the union of selected tiles
    double pool_size_frac = 0.0;
    std::size_t selected = 0;
};

struct SimulationRun {
    GroundTruth gt;
    TilePlan plan;
    std::vector<std::vector<Detection>> passes;
    std::set<std::string> pool;
    std::map<std::string, double> tta_scores;
    std::map<std::string, double> uscores;
};

// Wire the whole pipeline once; evaluate_strategy then reuses the run for
// several (strategy, k) combinations.
SimulationRun run_pipeline(const ColonyConfig& cfg, const DetectorNoise& noise, int passes,
                           double burrow_conf_threshold = 0.5);

StrategyMetrics evaluate_strategy(const SimulationRun& run, Strategy strategy, std::size_t k,
                                  std::uint64_t seed);

}  // namespace survey
