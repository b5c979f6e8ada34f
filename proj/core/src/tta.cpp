#include "survey/tta.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace survey {

std::vector<InstanceCluster> cluster_detections(const std::vector<Detection>& detections,
                                                double tau, int total_passes) {
    if (!(tau > 0.0 && tau <= 1.0))
        throw std::invalid_argument("cluster_detections: tau must lie in (0,1]");
    if (total_passes < 1)
        throw std::invalid_argument("cluster_detections: total_passes must be >= 1");
    if (!detections.empty()) {
        const std::string& tile = detections.front().tile_id;
        for (const auto& d : detections)
            if (d.tile_id != tile)
                throw std::invalid_argument("cluster_detections: detections from mismatched tiles");
    }

    std::vector<Detection> sorted = detections;
    std::sort(sorted.begin(), sorted.end(), [](const Detection& a, const Detection& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.bbox.x_min != b.bbox.x_min) return a.bbox.x_min < b.bbox.x_min;
        if (a.bbox.y_min != b.bbox.y_min) return a.bbox.y_min < b.bbox.y_min;
        return a.pass_id.value_or(0) < b.pass_id.value_or(0);
    });

    std::vector<InstanceCluster> clusters;
    for (const auto& d : sorted) {
        const int pass = d.pass_id.value_or(0);
        bool joined = false;
        for (auto& c : clusters) {
            if (c.class_id != d.class_id) continue;
            if (iou(c.representative, d.bbox) < tau) continue;
            const bool pass_taken = std::any_of(c.members.begin(), c.members.end(),
                                                [&](const auto& m) { return m.first == pass; });
            if (pass_taken) continue;
            c.members.emplace_back(pass, d.confidence);
            joined = true;
            break;
        }
        if (!joined) {
            InstanceCluster c;
            c.class_id = d.class_id;
            c.representative = d.bbox;  // founder has the highest confidence seen so far
            c.members.emplace_back(pass, d.confidence);
            c.total_passes = total_passes;
            clusters.push_back(std::move(c));
        }
    }
    for (auto& c : clusters) c.total_passes = total_passes;
    return clusters;
}

double confidence_uncertainty(const InstanceCluster& cluster, MissingPassPolicy policy) {
    const int T = cluster.total_passes;
    if (T < 1) throw std::invalid_argument("confidence_uncertainty: T must be >= 1");
    if (cluster.members.empty())
        throw std::invalid_argument("confidence_uncertainty: cluster has no members");

    std::vector<double> confs;
    if (policy == MissingPassPolicy::zero_confidence) {
        confs.assign(T, 0.0);
        // Pass ids may be arbitrary labels; only the multiset of confidences
        // matters for the variance, so fill slots in member order.
        for (std::size_t i = 0; i < cluster.members.size() && i < confs.size(); ++i)
            confs[i] = cluster.members[i].second;
    } else {
        for (const auto& [pass, conf] : cluster.members) confs.push_back(conf);
    }

    double mean = 0.0;
    for (double c : confs) mean += c;
    mean /= static_cast<double>(confs.size());
    double var = 0.0;
    for (double c : confs) var += (c - mean) * (c - mean);
    var /= static_cast<double>(confs.size());
    return std::clamp(4.0 * var, 0.0, 1.0);
}

double existence_uncertainty(const InstanceCluster& cluster) {
    const int T = cluster.total_passes;
    const int k = cluster.detected_count();
    if (T < 1) throw std::invalid_argument("existence_uncertainty: T must be >= 1");
    if (k > T) throw std::invalid_argument("existence_uncertainty: k exceeds T");
    const double p = (k + 0.5) / (T + 1.0);
    return 4.0 * p * (1.0 - p);
}

TileUncertainty tile_uncertainty(const std::vector<InstanceCluster>& clusters,
                                 const UncertaintyWeights& w, const std::string& tile_id,
                                 MissingPassPolicy policy) {
    TileUncertainty out;
    out.tile_id = tile_id;

    double sum_pd = 0.0, sum_b = 0.0;
    for (const auto& c : clusters) {
        InstanceUncertainty iu;
        iu.class_id = c.class_id;
        iu.u_c = confidence_uncertainty(c, policy);
        iu.u_ex = existence_uncertainty(c);
        out.breakdown.push_back(iu);
        if (c.class_id == ClassId::prairie_dog) {
            ++out.n_prairie_dog;
            sum_pd += w.w_c_pd * iu.u_c + w.w_ex_pd * iu.u_ex;
        } else {
            ++out.n_burrow;
            sum_b += w.w_c_b * iu.u_c + w.w_ex_b * iu.u_ex;
        }
    }
    const double alpha_pd = 1.0 / std::max(1, out.n_prairie_dog);
    const double alpha_b = 1.0 / std::max(1, out.n_burrow);
    out.score = alpha_pd * sum_pd + alpha_b * sum_b;
    return out;
}

}  // namespace survey
