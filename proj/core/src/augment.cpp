#include "survey/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace survey {

ContextMap segment_context(const RgbImage& img, const HsvThresholds& t) {
    ContextMap c;
    c.width = img.width;
    c.height = img.height;
    c.labels.resize(static_cast<std::size_t>(img.width) * img.height, Habitat::dirt);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const Hsv hsv = rgb_to_hsv(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
            if (hsv.h >= t.grass_hue_lo && hsv.h <= t.grass_hue_hi && hsv.s >= t.s_min)
                c.labels[static_cast<std::size_t>(y) * c.width + x] = Habitat::grass;
        }
    }
    return c;
}

AugmentParams sample_params(const AugmentRanges& r, double dirt_fraction, Rng& rng) {
    AugmentParams p;
    p.scale = rng.uniform(r.scale_lo, r.scale_hi);
    p.rotation_deg = rng.uniform(r.rot_lo, r.rot_hi);
    p.brightness = rng.uniform(r.brightness_lo, r.brightness_hi);
    p.contrast = rng.uniform(r.contrast_lo, r.contrast_hi);
    p.dirt_fraction = dirt_fraction;
    return p;
}

PlacementResult sample_placement(const ContextMap& c, int patch_w, int patch_h,
                                 double dirt_fraction, Rng& rng) {
    if (patch_w > c.width || patch_h > c.height)
        throw std::invalid_argument("sample_placement: patch larger than image");

    // Valid anchors are the patch-center pixels of fully-inside placements.
    const int cx_lo = patch_w / 2;
    const int cx_hi = cx_lo + (c.width - patch_w);   // inclusive
    const int cy_lo = patch_h / 2;
    const int cy_hi = cy_lo + (c.height - patch_h);

    auto collect = [&](Habitat want) {
        std::vector<std::pair<int, int>> anchors;
        for (int y = cy_lo; y <= cy_hi; ++y)
            for (int x = cx_lo; x <= cx_hi; ++x)
                if (c.at(x, y) == want) anchors.emplace_back(x, y);
        return anchors;
    };

    Habitat want = rng.bernoulli(dirt_fraction) ? Habitat::dirt : Habitat::grass;
    auto anchors = collect(want);
    bool fell_back = false;
    if (anchors.empty()) {
        want = want == Habitat::dirt ? Habitat::grass : Habitat::dirt;
        anchors = collect(want);
        fell_back = true;
        if (anchors.empty())
            throw std::runtime_error("sample_placement: no valid anchor for either habitat");
    }

    const auto [ax, ay] = anchors[rng.index(anchors.size())];
    PlacementResult res;
    res.x0 = ax - cx_lo;
    res.y0 = ay - cy_lo;
    res.chosen = want;
    res.fell_back = fell_back;
    return res;
}

namespace {

double sample_bilinear(const RgbImage& img, double x, double y, int ch) {
    const double cx = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
    const double cy = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(cx);
    const int y0 = static_cast<int>(cy);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = cx - x0, fy = cy - y0;
    return (1 - fx) * (1 - fy) * img.at(x0, y0, ch) + fx * (1 - fy) * img.at(x1, y0, ch) +
           (1 - fx) * fy * img.at(x0, y1, ch) + fx * fy * img.at(x1, y1, ch);
}

Patch scale_patch(const Patch& p, double scale) {
    const int ow = std::max(1, static_cast<int>(std::lround(p.image.width * scale)));
    const int oh = std::max(1, static_cast<int>(std::lround(p.image.height * scale)));
    Patch out;
    out.source_kind = p.source_kind;
    out.class_id = p.class_id;
    out.image = RgbImage(ow, oh);
    out.mask = BoolMask(ow, oh);
    const double sx = static_cast<double>(p.image.width) / ow;
    const double sy = static_cast<double>(p.image.height) / oh;
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            const double src_x = (x + 0.5) * sx - 0.5;
            const double src_y = (y + 0.5) * sy - 0.5;
            for (int ch = 0; ch < 3; ++ch)
                out.image.at(x, y, ch) = sample_bilinear(p.image, src_x, src_y, ch);
            const int nx = std::clamp(static_cast<int>(std::lround(src_x)), 0, p.mask.width - 1);
            const int ny = std::clamp(static_cast<int>(std::lround(src_y)), 0, p.mask.height - 1);
            out.mask.set(x, y, p.mask.at(nx, ny));
        }
    }
    return out;
}

// Exact index remap for 90-degree multiples; (x,y) -> (y, w-1-x) for +90.
Patch rotate_exact90(const Patch& p, int quarter_turns) {
    const int q = ((quarter_turns % 4) + 4) % 4;
    if (q == 0) return p;
    const int w = p.image.width, h = p.image.height;
    const int ow = (q % 2 == 0) ? w : h;
    const int oh = (q % 2 == 0) ? h : w;
    Patch out;
    out.source_kind = p.source_kind;
    out.class_id = p.class_id;
    out.image = RgbImage(ow, oh);
    out.mask = BoolMask(ow, oh);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int nx = 0, ny = 0;
            if (q == 1) { nx = y; ny = w - 1 - x; }
            else if (q == 2) { nx = w - 1 - x; ny = h - 1 - y; }
            else { nx = h - 1 - y; ny = x; }
            for (int ch = 0; ch < 3; ++ch) out.image.at(nx, ny, ch) = p.image.at(x, y, ch);
            out.mask.set(nx, ny, p.mask.at(x, y));
        }
    }
    return out;
}

Patch rotate_patch(const Patch& p, double deg) {
    const double quarter = deg / 90.0;
    if (std::fabs(quarter - std::lround(quarter)) < 1e-9)
        return rotate_exact90(p, static_cast<int>(std::lround(quarter)));

    const double rad = deg * M_PI / 180.0;
    const double cs = std::cos(rad), sn = std::sin(rad);
    const int w = p.image.width, h = p.image.height;
    // Rotated bounding box.
    const int ow = static_cast<int>(std::ceil(std::fabs(w * cs) + std::fabs(h * sn)));
    const int oh = static_cast<int>(std::ceil(std::fabs(w * sn) + std::fabs(h * cs)));

    Patch out;
    out.source_kind = p.source_kind;
    out.class_id = p.class_id;
    out.image = RgbImage(ow, oh);
    out.mask = BoolMask(ow, oh);
    const double ocx = (ow - 1) / 2.0, ocy = (oh - 1) / 2.0;
    const double icx = (w - 1) / 2.0, icy = (h - 1) / 2.0;
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            // Inverse rotation of the output pixel into the source frame.
            const double dx = x - ocx, dy = y - ocy;
            const double sx = cs * dx + sn * dy + icx;
            const double sy = -sn * dx + cs * dy + icy;
            const int nx = static_cast<int>(std::lround(sx));
            const int ny = static_cast<int>(std::lround(sy));
            const bool inside = nx >= 0 && nx < w && ny >= 0 && ny < h;
            out.mask.set(x, y, inside && p.mask.at(nx, ny));
            if (inside)
                for (int ch = 0; ch < 3; ++ch)
                    out.image.at(x, y, ch) = sample_bilinear(p.image, sx, sy, ch);
        }
    }
    return out;
}

void apply_illumination(Patch& p, double brightness, double contrast) {
    for (int y = 0; y < p.image.height; ++y) {
        for (int x = 0; x < p.image.width; ++x) {
            Hsv hsv = rgb_to_hsv(p.image.at(x, y, 0), p.image.at(x, y, 1), p.image.at(x, y, 2));
            hsv.v = std::clamp(contrast * (hsv.v - 0.5) + 0.5, 0.0, 1.0) * brightness;
            hsv.v = std::clamp(hsv.v, 0.0, 1.0);
            hsv_to_rgb(hsv, p.image.at(x, y, 0), p.image.at(x, y, 1), p.image.at(x, y, 2));
        }
    }
}

}  // namespace

Patch transform_patch(const Patch& p, const AugmentParams& params) {
    if (p.mask.count() == 0) throw std::invalid_argument("transform_patch: empty mask");
    Patch out = scale_patch(p, params.scale);
    out = rotate_patch(out, params.rotation_deg);
    apply_illumination(out, params.brightness, params.contrast);
    if (out.mask.count() == 0)
        throw std::runtime_error("transform_patch: transform emptied the mask");
    return out;
}

namespace {

BBox mask_bbox(const BoolMask& mask, int x0, int y0) {
    int mn_x = mask.width, mn_y = mask.height, mx_x = -1, mx_y = -1;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) {
                mn_x = std::min(mn_x, x);
                mn_y = std::min(mn_y, y);
                mx_x = std::max(mx_x, x);
                mx_y = std::max(mx_y, y);
            }
    return BBox(x0 + mn_x, y0 + mn_y, x0 + mx_x + 1, y0 + mx_y + 1);
}

const std::vector<Patch>* pick_pool(const PatchPools& pools, const PoolMix& mix, Rng& rng) {
    struct Entry {
        const std::vector<Patch>* pool;
        double weight;
    };
    std::vector<Entry> entries;
    if (!pools.labeled.empty()) entries.push_back({&pools.labeled, mix.labeled});
    if (!pools.false_positive.empty()) entries.push_back({&pools.false_positive, mix.false_positive});
    if (!pools.false_negative.empty()) entries.push_back({&pools.false_negative, mix.false_negative});
    if (entries.empty()) return nullptr;
    double total = 0.0;
    for (const auto& e : entries) total += e.weight;
    if (total <= 0.0) return entries.front().pool;
    double u = rng.uniform() * total;
    for (const auto& e : entries) {
        u -= e.weight;
        if (u <= 0.0) return e.pool;
    }
    return entries.back().pool;
}

}  // namespace

AugmentedImage augment_image(const RgbImage& background, const PatchPools& pools,
                             const AugmentConfig& cfg, Rng& rng,
                             const std::vector<Detection>& existing) {
    if (pools.empty()) throw std::invalid_argument("augment_image: empty patch pools");

    const ContextMap context = segment_context(background, cfg.thresholds);

    AugmentedImage result;
    result.image = background;
    std::vector<BBox> occupied;
    for (const auto& d : existing) occupied.push_back(d.bbox);

    const int n_patches =
        cfg.min_patches + static_cast<int>(rng.index(cfg.max_patches - cfg.min_patches + 1));

    for (int n = 0; n < n_patches; ++n) {
        const auto* pool = pick_pool(pools, cfg.mix, rng);
        if (!pool) break;
        const Patch& raw = (*pool)[rng.index(pool->size())];
        const AugmentParams params = sample_params(cfg.ranges, cfg.dirt_fraction, rng);
        Patch patch = transform_patch(raw, params);
        if (patch.image.width + 2 > background.width || patch.image.height + 2 > background.height) {
            ++result.patches_skipped;
            continue;
        }

        bool placed = false;
        for (int attempt = 0; attempt < cfg.max_resample_attempts && !placed; ++attempt) {
            PlacementResult pos;
            try {
                pos = sample_placement(context, patch.image.width, patch.image.height,
                                       cfg.dirt_fraction, rng);
            } catch (const std::runtime_error&) {
                break;
            }
            // Keep a 1px background ring inside the image for the Dirichlet boundary.
            pos.x0 = std::clamp(pos.x0, 1, background.width - patch.image.width - 1);
            pos.y0 = std::clamp(pos.y0, 1, background.height - patch.image.height - 1);

            const BBox placed_box = mask_bbox(patch.mask, pos.x0, pos.y0);
            bool clash = false;
            for (const auto& b : occupied)
                if (iou(placed_box, b) > cfg.overlap_iou_limit) {
                    clash = true;
                    break;
                }
            if (clash) continue;

            if (pos.fell_back) ++result.placement_fallbacks;
            result.image = poisson_blend(result.image, patch, pos.x0, pos.y0);
            occupied.push_back(placed_box);
            ++result.patches_placed;
            placed = true;

            if (patch.source_kind != PatchSource::false_positive)
                result.annotations.emplace_back(placed_box, patch.class_id, 1.0);
        }
        if (!placed) ++result.patches_skipped;
    }
    if (result.patches_placed == 0)
        throw std::runtime_error("augment_image: no valid placement found for any patch");
    return result;
}

}  // namespace survey
