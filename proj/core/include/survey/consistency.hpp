#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "survey/rng.hpp"

namespace survey {

// Dense C x H x W tensor, one pyramid level. Row-major within a channel,
// channels outermost. Double precision throughout.
struct FeatureMap {
    int C = 0, H = 0, W = 0;
    std::vector<double> values;

    FeatureMap() = default;
    FeatureMap(int c, int h, int w, double fill = 0.0);

    double& at(int c, int i, int j) { return values[(static_cast<std::size_t>(c) * H + i) * W + j]; }
    double at(int c, int i, int j) const {
        return values[(static_cast<std::size_t>(c) * H + i) * W + j];
    }
    std::size_t size() const { return values.size(); }
    bool same_shape(const FeatureMap& o) const { return C == o.C && H == o.H && W == o.W; }
};

struct TriLossWeights {
    double alpha = 10.0;
    double beta = 1.0;
    double gamma = 1.0;
};

// Loss value plus analytic gradients with respect to the three inputs, in
// their original resolutions.
struct LossResult {
    double value = 0.0;
    FeatureMap grad_p3, grad_p4, grad_p5;
};

// Per-component values of the combined loss, for reporting.
struct TriLossBreakdown {
    double mse = 0.0, kl = 0.0, cos = 0.0;
};

// Nearest-neighbor upsampling by an integer factor. The adjoint (used when
// chaining gradients) sums each factor x factor output block back to its
// source cell.
FeatureMap upsample_nearest(const FeatureMap& f, int factor);
FeatureMap downsum(const FeatureMap& f, int factor);  // adjoint of upsample_nearest

// The three component losses. All inputs must share one shape; p4u and p5u
// are expected already upsampled to the p3 grid.
LossResult loss_mse(const FeatureMap& p3, const FeatureMap& p4u, const FeatureMap& p5u);
LossResult loss_kl(const FeatureMap& p3, const FeatureMap& p4u, const FeatureMap& p5u);
LossResult loss_cos(const FeatureMap& p3, const FeatureMap& p4u, const FeatureMap& p5u);

// Combined weighted loss over a pyramid: p4 at half and p5 at quarter of the
// p3 resolution. Gradients are chain-ruled back through the upsampling.
LossResult consistency_loss(const FeatureMap& p3, const FeatureMap& p4, const FeatureMap& p5,
                            const TriLossWeights& w, TriLossBreakdown* breakdown = nullptr);

// Central finite-difference check of a loss function's analytic gradient.
// Checks every coordinate up to `max_coords` per input; beyond that, a random
// subsample of at least 200 coordinates. Returns the max relative error with
// denominator max(|analytic|, |numeric|, 1e-8).
using LossFn = std::function<LossResult(const std::vector<FeatureMap>&)>;
double grad_check(const LossFn& fn, std::vector<FeatureMap> inputs, double step,
                  std::size_t max_coords = 4096, std::uint64_t seed = 0);

// Channel-mean activation map, min-max normalized to [0,1]; constant maps
// normalize to all zeros.
std::vector<double> channel_mean_heatmap(const FeatureMap& f);

}  // namespace survey
