#pragma once

#include <string>
#include <utility>
#include <vector>

#include "survey/geometry.hpp"

namespace survey {

// One putative object instance across TTA passes.
struct InstanceCluster {
    ClassId class_id = ClassId::prairie_dog;
    BBox representative;                               // highest-confidence member's box
    std::vector<std::pair<int, double>> members;       // (pass_id, confidence), one per pass at most
    int total_passes = 0;                              // T

    int detected_count() const { return static_cast<int>(members.size()); }
};

struct UncertaintyWeights {
    double w_c_pd = 1.0;
    double w_ex_pd = 1.0;
    double w_c_b = 0.25;
    double w_ex_b = 0.25;
};

struct InstanceUncertainty {
    ClassId class_id;
    double u_c = 0.0;
    double u_ex = 0.0;
};

struct TileUncertainty {
    std::string tile_id;
    double score = 0.0;
    std::vector<InstanceUncertainty> breakdown;
    int n_prairie_dog = 0;
    int n_burrow = 0;
};

// How undetected passes enter the confidence variance.
enum class MissingPassPolicy {
    zero_confidence,  // absent passes contribute confidence 0 (default)
    detected_only,    // variance over detected passes only
};

// Greedy cross-pass clustering. Detections are sorted by (confidence desc,
// x_min asc, y_min asc, pass_id asc); each joins the first cluster of its
// class whose representative overlaps at IoU >= tau and that has no member
// from its pass yet, else founds a new cluster. Inputs must already be in the
// canonical frame (remap_detection applied).
std::vector<InstanceCluster> cluster_detections(const std::vector<Detection>& detections,
                                                double tau, int total_passes);

// 4 * population variance of the per-pass confidences, clamped to [0,1].
double confidence_uncertainty(const InstanceCluster& cluster,
                              MissingPassPolicy policy = MissingPassPolicy::zero_confidence);

// Jeffreys-smoothed detection rate p = (k+0.5)/(T+1); 4 p (1-p).
double existence_uncertainty(const InstanceCluster& cluster);

// Count-normalized per-class aggregation of the instance uncertainties.
TileUncertainty tile_uncertainty(const std::vector<InstanceCluster>& clusters,
                                 const UncertaintyWeights& w, const std::string& tile_id,
                                 MissingPassPolicy policy = MissingPassPolicy::zero_confidence);

}  // namespace survey
