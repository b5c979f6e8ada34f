#pragma once

#include <optional>
#include <vector>

#include "survey/geometry.hpp"
#include "survey/image.hpp"
#include "survey/rng.hpp"

namespace survey {

struct HsvThresholds {
    double grass_hue_lo = 60.0;   // degrees
    double grass_hue_hi = 170.0;
    double s_min = 0.15;
};

// Pixel-wise habitat labeling: grass iff hue in [lo,hi] and saturation >= s_min.
ContextMap segment_context(const RgbImage& img, const HsvThresholds& thresholds = {});

struct AugmentParams {
    double scale = 1.0;          // in [0.9, 1.1]
    double rotation_deg = 0.0;   // in [-90, +90]
    double brightness = 1.0;     // in [0.8, 1.2]
    double contrast = 1.0;       // in [0.9, 1.1]
    double dirt_fraction = 0.90;
};

struct AugmentRanges {
    double scale_lo = 0.9, scale_hi = 1.1;
    double rot_lo = -90.0, rot_hi = 90.0;
    double brightness_lo = 0.8, brightness_hi = 1.2;
    double contrast_lo = 0.9, contrast_hi = 1.1;
};

AugmentParams sample_params(const AugmentRanges& ranges, double dirt_fraction, Rng& rng);

struct PlacementResult {
    int x0 = 0, y0 = 0;       // top-left of the patch in the image
    Habitat chosen = Habitat::dirt;
    bool fell_back = false;   // requested label had no valid anchor
};

// Choose a habitat label (dirt with probability dirt_fraction), then sample a
// position uniformly among placements whose patch-center pixel carries that
// label. Falls back to the other label when the chosen one has no anchors.
PlacementResult sample_placement(const ContextMap& c, int patch_w, int patch_h,
                                 double dirt_fraction, Rng& rng);

// Scale (bilinear), rotate (bilinear image / nearest mask; exact index maps
// for multiples of 90 degrees), then brightness/contrast on the HSV value
// channel: v' = clamp01(contrast * (v - 0.5) + 0.5) * brightness.
Patch transform_patch(const Patch& p, const AugmentParams& params);

struct PoissonStats {
    int iterations = 0;
    double cg_rel_residual = 0.0;   // final CG residual / initial residual
    double max_pde_residual = 0.0;  // discrete Poisson equation residual, pre-clamp
    bool converged = true;
};

// Seamless cloning: per channel, solve the discrete Poisson equation on the
// interior mask pixels with source gradients as guidance and the background
// as Dirichlet boundary. Conjugate gradient on the 5-point Laplacian,
// relative residual 1e-6 or 10000 iterations. Output clamped to [0,1];
// residual stats are measured before clamping. The mask must not touch the
// patch border (the boundary ring must come from the background).
RgbImage poisson_blend(const RgbImage& background, const Patch& patch, int x0, int y0,
                       PoissonStats* stats = nullptr, double tol = 1e-6,
                       int max_iters = 10000);

struct PatchPools {
    std::vector<Patch> labeled;
    std::vector<Patch> false_positive;
    std::vector<Patch> false_negative;

    bool empty() const {
        return labeled.empty() && false_positive.empty() && false_negative.empty();
    }
};

struct PoolMix {
    double labeled = 0.50;
    double false_positive = 0.25;
    double false_negative = 0.25;
};

struct AugmentConfig {
    AugmentRanges ranges;
    double dirt_fraction = 0.90;
    PoolMix mix;
    int min_patches = 1;
    int max_patches = 3;
    double overlap_iou_limit = 0.3;
    int max_resample_attempts = 10;
    HsvThresholds thresholds;
};

struct AugmentedImage {
    RgbImage image;
    std::vector<Detection> annotations;  // labeled/FN placements only
    int patches_placed = 0;
    int patches_skipped = 0;
    int placement_fallbacks = 0;
};

// Compose one augmented sample: draw patches from the pools, transform,
// place per the habitat rule, and blend. False-positive patches are hard
// negatives and emit no annotation. Placements overlapping existing
// annotations above the IoU limit are re-sampled, then skipped.
AugmentedImage augment_image(const RgbImage& background, const PatchPools& pools,
                             const AugmentConfig& cfg, Rng& rng,
                             const std::vector<Detection>& existing = {});

}  // namespace survey
