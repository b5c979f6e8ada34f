#pragma once

#include <tuple>
#include <vector>

#include "survey/geometry.hpp"

namespace survey {

// Class-aware bipartite matching of predictions to ground truths.
struct MatchResult {
    // (prediction index, ground-truth index, iou)
    std::vector<std::tuple<int, int, double>> matched;
    std::vector<int> unmatched_gts;    // false negatives
    std::vector<int> unmatched_preds;  // false positives
};

// Optimal assignment maximizing total IoU over pairs with IoU >= threshold
// and equal class. Ties between equal-weight assignments resolve to the
// lexicographically smallest (pred index, gt index) pair set.
MatchResult match_detections(const std::vector<Detection>& preds,
                             const std::vector<Detection>& gts, double iou_threshold = 0.5);

// Aggregate detection-error score, normalized by |P| + |G| - |M|. Empty tile
// (no predictions, no ground truths) scores 0.
double u_score(const std::vector<Detection>& preds, const std::vector<Detection>& gts,
               const MatchResult& m);

double u_score(const std::vector<Detection>& preds, const std::vector<Detection>& gts,
               double iou_threshold = 0.5);

}  // namespace survey
