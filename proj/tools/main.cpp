// surveykit: command-line surface over the survey core library. Every
// subcommand writes a manifest JSON beside its primary output so runs are
// reproducible from the manifest alone.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "survey/augment.hpp"
#include "survey/consistency.hpp"
#include "survey/geo.hpp"
#include "survey/image.hpp"
#include "survey/io.hpp"
#include "survey/sim.hpp"
#include "survey/tiling.hpp"
#include "survey/tta.hpp"
#include "survey/uscore.hpp"

using json = nlohmann::json;
using namespace survey;

namespace {

// Defaults shared by several subcommands; a config file may override them,
// and flags override the file.
struct AppConfig {
    int tile_size = 512;
    double overlap_frac = 0.30;
    double gsd_m_per_px = 0.02;
    double tau = 0.5;
    double radius_m = 15.2;
    double burrow_conf_threshold = 0.5;
    TriLossWeights tri;
    UncertaintyWeights uw;
    double dirt_fraction = 0.90;
    double iou_threshold = 0.5;
    int passes = 5;
    std::uint64_t seed = 1;

    json to_json() const {
        return json{{"tile_size", tile_size},
                    {"overlap_frac", overlap_frac},
                    {"gsd_m_per_px", gsd_m_per_px},
                    {"tau", tau},
                    {"radius_m", radius_m},
                    {"burrow_conf_threshold", burrow_conf_threshold},
                    {"alpha", tri.alpha},
                    {"beta", tri.beta},
                    {"gamma", tri.gamma},
                    {"w_c_pd", uw.w_c_pd},
                    {"w_ex_pd", uw.w_ex_pd},
                    {"w_c_b", uw.w_c_b},
                    {"w_ex_b", uw.w_ex_b},
                    {"dirt_fraction", dirt_fraction},
                    {"iou_threshold", iou_threshold},
                    {"passes", passes},
                    {"seed", seed}};
    }
};

AppConfig load_config(const std::string& path) {
    AppConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    in >> j;
    const json known = cfg.to_json();
    for (const auto& [key, value] : j.items())
        if (!known.contains(key))
            throw std::invalid_argument("unknown config key: " + key);
    cfg.tile_size = j.value("tile_size", cfg.tile_size);
    cfg.overlap_frac = j.value("overlap_frac", cfg.overlap_frac);
    cfg.gsd_m_per_px = j.value("gsd_m_per_px", cfg.gsd_m_per_px);
    cfg.tau = j.value("tau", cfg.tau);
    cfg.radius_m = j.value("radius_m", cfg.radius_m);
    cfg.burrow_conf_threshold = j.value("burrow_conf_threshold", cfg.burrow_conf_threshold);
    cfg.tri.alpha = j.value("alpha", cfg.tri.alpha);
    cfg.tri.beta = j.value("beta", cfg.tri.beta);
    cfg.tri.gamma = j.value("gamma", cfg.tri.gamma);
    cfg.uw.w_c_pd = j.value("w_c_pd", cfg.uw.w_c_pd);
    cfg.uw.w_ex_pd = j.value("w_ex_pd", cfg.uw.w_ex_pd);
    cfg.uw.w_c_b = j.value("w_c_b", cfg.uw.w_c_b);
    cfg.uw.w_ex_b = j.value("w_ex_b", cfg.uw.w_ex_b);
    cfg.dirt_fraction = j.value("dirt_fraction", cfg.dirt_fraction);
    cfg.iou_threshold = j.value("iou_threshold", cfg.iou_threshold);
    cfg.passes = j.value("passes", cfg.passes);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

void emit_manifest(const std::string& subcommand, const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs, const AppConfig& cfg,
                   std::uint64_t seed) {
    if (outputs.empty()) return;
    Manifest m;
    m.subcommand = subcommand;
    m.inputs = inputs;
    m.outputs = outputs;
    m.config_json = cfg.to_json().dump();
    m.seed = seed;
    write_manifest(m, outputs.front() + ".manifest.json");
}

std::map<std::string, std::vector<Detection>> by_tile(const std::vector<Detection>& dets) {
    std::map<std::string, std::vector<Detection>> out;
    for (const auto& d : dets) out[d.tile_id].push_back(d);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    // The config file seeds flag defaults, so it must be read before the
    // full parse.
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];

    try {
        AppConfig cfg = load_config(config_path);

        CLI::App app{"survey detection + active-learning toolkit"};
        app.require_subcommand(1);
        int jobs = 1;
        app.add_option("--config", config_path, "JSON config file (flags override it)");
        app.add_option("--jobs", jobs, "worker threads (output is identical for any value)");

        // ---- tile ----------------------------------------------------------
        auto* tile = app.add_subcommand("tile", "plan a sliding-window tiling of a mosaic");
        int t_w = 0, t_h = 0;
        std::string t_out, t_csv;
        tile->add_option("--width", t_w, "mosaic width (px)")->required();
        tile->add_option("--height", t_h, "mosaic height (px)")->required();
        tile->add_option("--tile-size", cfg.tile_size, "tile side (px)");
        tile->add_option("--overlap", cfg.overlap_frac, "overlap fraction");
        tile->add_option("--out", t_out, "plan JSON path")->required();
        tile->add_option("--csv", t_csv, "also write a tile_id,x0,y0 CSV");
        tile->callback([&] {
            const TilePlan plan = plan_tiles(t_w, t_h, cfg.tile_size, cfg.overlap_frac);
            write_plan_json(plan, t_out);
            std::vector<std::string> outs = {t_out};
            if (!t_csv.empty()) {
                write_plan_csv(plan, t_csv);
                outs.push_back(t_csv);
            }
            emit_manifest("tile", {}, outs, cfg, cfg.seed);
            std::cout << plan.tiles.size() << " tiles\n";
        });

        // ---- background-sample ---------------------------------------------
        auto* bgs = app.add_subcommand("background-sample",
                                       "sample unannotated tiles to balance a training set");
        std::string b_plan, b_ann, b_out;
        std::size_t b_count = 0;
        bgs->add_option("--plan", b_plan, "plan JSON")->required();
        bgs->add_option("--annotations", b_ann, "detections JSONL marking annotated tiles")
            ->required();
        bgs->add_option("--count", b_count, "number of tiles to sample")->required();
        bgs->add_option("--seed", cfg.seed, "sampling seed");
        bgs->add_option("--out", b_out, "output list, one tile_id per line")->required();
        bgs->callback([&] {
            TilePlan plan = read_plan_json(b_plan);
            std::set<std::string> annotated;
            for (const auto& d : read_detections_jsonl(b_ann)) annotated.insert(d.tile_id);
            for (auto& t : plan.tiles) t.has_annotations = annotated.count(t.tile_id) > 0;
            std::set<std::string> ids;
            for (const auto& t : sample_background_tiles(plan, b_count, cfg.seed))
                ids.insert(t.tile_id);
            write_pool(ids, b_out);
            emit_manifest("background-sample", {b_plan, b_ann}, {b_out}, cfg, cfg.seed);
        });

        // ---- consistency ---------------------------------------------------
        auto* cons = app.add_subcommand("consistency",
                                        "multi-scale consistency loss and gradients");
        std::string c_p3, c_p4, c_p5, c_grad_prefix;
        cons->add_option("--p3", c_p3, "finest feature map")->required();
        cons->add_option("--p4", c_p4, "half-resolution feature map")->required();
        cons->add_option("--p5", c_p5, "quarter-resolution feature map")->required();
        cons->add_option("--alpha", cfg.tri.alpha, "squared-error weight");
        cons->add_option("--beta", cfg.tri.beta, "divergence weight");
        cons->add_option("--gamma", cfg.tri.gamma, "direction weight");
        cons->add_option("--grad-out", c_grad_prefix, "prefix for gradient feature maps");
        cons->callback([&] {
            const FeatureMap p3 = read_feature_map(c_p3);
            const FeatureMap p4 = read_feature_map(c_p4);
            const FeatureMap p5 = read_feature_map(c_p5);
            TriLossBreakdown bd;
            const LossResult r = consistency_loss(p3, p4, p5, cfg.tri, &bd);
            std::vector<std::string> outs;
            if (!c_grad_prefix.empty()) {
                write_feature_map(r.grad_p3, c_grad_prefix + "_p3.bin");
                write_feature_map(r.grad_p4, c_grad_prefix + "_p4.bin");
                write_feature_map(r.grad_p5, c_grad_prefix + "_p5.bin");
                outs = {c_grad_prefix + "_p3.bin", c_grad_prefix + "_p4.bin",
                        c_grad_prefix + "_p5.bin"};
                emit_manifest("consistency", {c_p3, c_p4, c_p5}, outs, cfg, cfg.seed);
            }
            std::cout << json{{"loss", r.value},
                              {"mse", bd.mse},
                              {"kl", bd.kl},
                              {"cos", bd.cos}}
                             .dump()
                      << "\n";
        });

        // ---- gradcheck -----------------------------------------------------
        auto* gc = app.add_subcommand("gradcheck",
                                      "verify analytic gradients against finite differences");
        int gc_trials = 20, gc_c = 4, gc_hw = 8;
        double gc_step = 1e-5, gc_tol = 1e-4;
        gc->add_option("--trials", gc_trials, "random pyramids to test");
        gc->add_option("--channels", gc_c, "channels per map");
        gc->add_option("--size", gc_hw, "finest spatial size");
        gc->add_option("--step", gc_step, "finite-difference step");
        gc->add_option("--tol", gc_tol, "max relative error allowed");
        gc->add_option("--seed", cfg.seed, "rng seed");
        gc->callback([&] {
            std::mt19937_64 rng(cfg.seed);
            std::normal_distribution<double> n(0.0, 1.0);
            auto rand_map = [&](int h) {
                FeatureMap f(gc_c, h, h);
                for (double& v : f.values) v = n(rng);
                return f;
            };
            double worst = 0.0;
            for (int t = 0; t < gc_trials; ++t) {
                std::vector<FeatureMap> pyr = {rand_map(gc_hw), rand_map(gc_hw / 2),
                                               rand_map(gc_hw / 4)};
                auto fn = [&](const std::vector<FeatureMap>& in) {
                    return consistency_loss(in[0], in[1], in[2], cfg.tri);
                };
                worst = std::max(worst, grad_check(fn, pyr, gc_step));
            }
            std::cout << json{{"max_relative_error", worst}, {"tolerance", gc_tol}}.dump()
                      << "\n";
            if (worst >= gc_tol) throw std::invalid_argument("gradient check failed");
        });

        // ---- segment -------------------------------------------------------
        auto* seg = app.add_subcommand("segment", "label each pixel dirt or grass");
        std::string s_in, s_out;
        HsvThresholds thresholds;
        seg->add_option("--image", s_in, "input PNG")->required();
        seg->add_option("--out", s_out, "output mask PNG (grass = white)")->required();
        seg->add_option("--hue-lo", thresholds.grass_hue_lo, "grass hue lower bound (deg)");
        seg->add_option("--hue-hi", thresholds.grass_hue_hi, "grass hue upper bound (deg)");
        seg->add_option("--sat-min", thresholds.s_min, "minimum saturation for grass");
        seg->callback([&] {
            const RgbImage img = load_png(s_in);
            const ContextMap c = segment_context(img, thresholds);
            BoolMask mask(c.width, c.height);
            for (int y = 0; y < c.height; ++y)
                for (int x = 0; x < c.width; ++x) mask.set(x, y, c.at(x, y) == Habitat::grass);
            save_mask_png(mask, s_out);
            emit_manifest("segment", {s_in}, {s_out}, cfg, cfg.seed);
        });

        // ---- augment -------------------------------------------------------
        auto* aug = app.add_subcommand("augment",
                                       "compose context-aware augmented training images");
        std::string a_bg, a_pools, a_out, a_ann;
        int a_count = 1;
        aug->add_option("--background", a_bg, "background tile PNG")->required();
        aug->add_option("--pools", a_pools,
                        "patch pool directory with manifest.json entries "
                        "[{image,mask,source_kind,class}]")
            ->required();
        aug->add_option("--count", a_count, "augmented images to generate");
        aug->add_option("--seed", cfg.seed, "rng seed");
        aug->add_option("--out", a_out, "output PNG (index appended when --count > 1)")
            ->required();
        aug->add_option("--annotations-out", a_ann, "annotations JSONL (default beside --out)");
        aug->callback([&] {
            const RgbImage bg = load_png(a_bg);
            PatchPools pools;
            {
                std::ifstream in(a_pools + "/manifest.json");
                if (!in) throw std::runtime_error("cannot open " + a_pools + "/manifest.json");
                json j;
                in >> j;
                for (const auto& e : j) {
                    Patch p;
                    p.image = load_png(a_pools + "/" + e.at("image").get<std::string>());
                    p.mask = load_mask_png(a_pools + "/" + e.at("mask").get<std::string>());
                    p.class_id = class_from_name(e.at("class").get<std::string>());
                    const std::string kind = e.at("source_kind").get<std::string>();
                    if (kind == "labeled") {
                        p.source_kind = PatchSource::labeled;
                        pools.labeled.push_back(std::move(p));
                    } else if (kind == "false_positive") {
                        p.source_kind = PatchSource::false_positive;
                        pools.false_positive.push_back(std::move(p));
                    } else if (kind == "false_negative") {
                        p.source_kind = PatchSource::false_negative;
                        pools.false_negative.push_back(std::move(p));
                    } else {
                        throw std::invalid_argument("unknown source_kind: " + kind);
                    }
                }
            }
            AugmentConfig acfg;
            acfg.dirt_fraction = cfg.dirt_fraction;
            Rng rng(cfg.seed);
            std::vector<Detection> all_annotations;
            std::vector<std::string> outs;
            for (int i = 0; i < a_count; ++i) {
                Rng child = rng.split(static_cast<std::uint64_t>(i));
                const AugmentedImage out = augment_image(bg, pools, acfg, child);
                std::string path = a_out;
                if (a_count > 1) {
                    const auto dot = path.rfind('.');
                    path = path.substr(0, dot) + "_" + std::to_string(i) + path.substr(dot);
                }
                save_png(out.image, path);
                outs.push_back(path);
                for (Detection d : out.annotations) {
                    d.tile_id = std::filesystem::path(path).stem().string();
                    all_annotations.push_back(d);
                }
            }
            const std::string ann_path =
                a_ann.empty() ? a_out + ".annotations.jsonl" : a_ann;
            write_detections_jsonl(all_annotations, ann_path);
            outs.push_back(ann_path);
            emit_manifest("augment", {a_bg, a_pools}, outs, cfg, cfg.seed);
        });

        // ---- cluster -------------------------------------------------------
        auto* clu = app.add_subcommand("cluster",
                                       "group per-pass detections into object instances");
        std::string cl_in, cl_out;
        clu->add_option("--detections", cl_in, "detections JSONL with pass_id")->required();
        clu->add_option("--tau", cfg.tau, "IoU join threshold");
        clu->add_option("--passes", cfg.passes, "total augmentation passes T");
        clu->add_option("--out", cl_out, "clusters JSONL")->required();
        clu->callback([&] {
            const auto tiles = by_tile(read_detections_jsonl(cl_in));
            std::ofstream out(cl_out);
            if (!out) throw std::runtime_error("cannot open " + cl_out);
            for (const auto& [tile_id, dets] : tiles) {
                for (const auto& c : cluster_detections(dets, cfg.tau, cfg.passes)) {
                    json members = json::array();
                    for (const auto& [pass, conf] : c.members)
                        members.push_back({{"pass_id", pass}, {"confidence", conf}});
                    out << json{{"tile_id", tile_id},
                                {"class", class_name(c.class_id)},
                                {"x_min", c.representative.x_min},
                                {"y_min", c.representative.y_min},
                                {"x_max", c.representative.x_max},
                                {"y_max", c.representative.y_max},
                                {"members", members},
                                {"total_passes", c.total_passes}}
                               .dump()
                        << "\n";
                }
            }
            emit_manifest("cluster", {cl_in}, {cl_out}, cfg, cfg.seed);
        });

        // ---- uncertainty ---------------------------------------------------
        auto* unc = app.add_subcommand("uncertainty",
                                       "per-tile uncertainty scores from multi-pass detections");
        std::string u_in, u_out, u_plan;
        unc->add_option("--detections", u_in, "detections JSONL with pass_id")->required();
        unc->add_option("--plan", u_plan, "plan JSON; tiles without detections score 0");
        unc->add_option("--tau", cfg.tau, "IoU join threshold");
        unc->add_option("--passes", cfg.passes, "total augmentation passes T");
        unc->add_option("--w-c-pd", cfg.uw.w_c_pd, "confidence weight, prairie dog");
        unc->add_option("--w-ex-pd", cfg.uw.w_ex_pd, "existence weight, prairie dog");
        unc->add_option("--w-c-b", cfg.uw.w_c_b, "confidence weight, burrow");
        unc->add_option("--w-ex-b", cfg.uw.w_ex_b, "existence weight, burrow");
        unc->add_option("--out", u_out, "scores CSV")->required();
        unc->callback([&] {
            std::map<std::string, double> scores;
            if (!u_plan.empty())
                for (const auto& t : read_plan_json(u_plan).tiles) scores[t.tile_id] = 0.0;
            for (const auto& [tile_id, dets] : by_tile(read_detections_jsonl(u_in))) {
                const auto clusters = cluster_detections(dets, cfg.tau, cfg.passes);
                scores[tile_id] = tile_uncertainty(clusters, cfg.uw, tile_id).score;
            }
            write_scores_csv(scores, u_out, "uncertainty");
            std::vector<std::string> ins = {u_in};
            if (!u_plan.empty()) ins.push_back(u_plan);
            emit_manifest("uncertainty", ins, {u_out}, cfg, cfg.seed);
        });

        // ---- uscore --------------------------------------------------------
        auto* usc = app.add_subcommand("uscore",
                                       "per-tile detection-error scores against ground truth");
        std::string us_pred, us_gt, us_out;
        usc->add_option("--preds", us_pred, "predictions JSONL")->required();
        usc->add_option("--gt", us_gt, "ground-truth JSONL")->required();
        usc->add_option("--iou-threshold", cfg.iou_threshold, "minimum IoU for a match");
        usc->add_option("--out", us_out, "scores CSV")->required();
        usc->callback([&] {
            auto preds = by_tile(read_detections_jsonl(us_pred));
            auto gts = by_tile(read_detections_jsonl(us_gt));
            std::set<std::string> tiles;
            for (const auto& [id, v] : preds) tiles.insert(id);
            for (const auto& [id, v] : gts) tiles.insert(id);
            std::map<std::string, double> scores;
            for (const auto& id : tiles)
                scores[id] = u_score(preds[id], gts[id], cfg.iou_threshold);
            write_scores_csv(scores, us_out, "u_score");
            emit_manifest("uscore", {us_pred, us_gt}, {us_out}, cfg, cfg.seed);
        });

        // ---- filter --------------------------------------------------------
        auto* fil = app.add_subcommand("filter",
                                       "geospatial candidate pool from burrow detections");
        std::string f_plan, f_dets, f_out;
        fil->add_option("--plan", f_plan, "plan JSON")->required();
        fil->add_option("--detections", f_dets, "mosaic-frame detections JSONL")->required();
        fil->add_option("--conf", cfg.burrow_conf_threshold, "burrow confidence threshold");
        fil->add_option("--radius-m", cfg.radius_m, "proximity radius (meters)");
        fil->add_option("--gsd", cfg.gsd_m_per_px, "ground sampling distance (m/px)");
        fil->add_option("--out", f_out, "pool file, one tile_id per line")->required();
        fil->callback([&] {
            const TilePlan plan = read_plan_json(f_plan);
            const auto dets = read_detections_jsonl(f_dets);
            const GeoTransform geo{cfg.gsd_m_per_px, 0.0, 0.0};
            const SpatialIndex idx =
                build_spatial_index(dets, cfg.burrow_conf_threshold, geo, cfg.radius_m,
                                    plan.mosaic_w, plan.mosaic_h);
            write_pool(geospatial_filter(plan, idx), f_out);
            emit_manifest("filter", {f_plan, f_dets}, {f_out}, cfg, cfg.seed);
        });

        // ---- rank ----------------------------------------------------------
        auto* rnk = app.add_subcommand("rank", "budgeted tile selection");
        std::string r_pool, r_scores, r_plan, r_strategy = "geo_tta", r_out;
        std::size_t r_k = 0;
        rnk->add_option("--pool", r_pool, "candidate pool file")->required();
        rnk->add_option("--scores", r_scores, "scores CSV (score-based strategies)");
        rnk->add_option("--plan", r_plan, "plan JSON")->required();
        rnk->add_option("--strategy", r_strategy,
                        "random | geo_random | geo_tta | geo_uscore");
        rnk->add_option("--k", r_k, "budget")->required();
        rnk->add_option("--seed", cfg.seed, "sampling seed");
        rnk->add_option("--out", r_out, "batch JSON")->required();
        rnk->callback([&] {
            const TilePlan plan = read_plan_json(r_plan);
            const std::set<std::string> pool = read_pool(r_pool);
            std::map<std::string, double> scores;
            if (!r_scores.empty()) scores = read_scores_csv(r_scores);
            const AcquisitionBatch batch = rank_tiles(
                pool, scores, strategy_from_name(r_strategy), r_k, cfg.seed, plan);
            write_batch_json(batch, r_out);
            std::vector<std::string> ins = {r_pool, r_plan};
            if (!r_scores.empty()) ins.push_back(r_scores);
            emit_manifest("rank", ins, {r_out}, cfg, cfg.seed);
            if (batch.truncated_pool)
                std::cerr << "warning: budget exceeded pool size; returned the full pool\n";
        });

        // ---- simulate ------------------------------------------------------
        auto* sim = app.add_subcommand("simulate",
                                       "generate a synthetic colony and run the pipeline");
        std::string sm_dir;
        sim->add_option("--out-dir", sm_dir, "output directory")->required();
        sim->add_option("--seed", cfg.seed, "colony seed");
        sim->add_option("--passes", cfg.passes, "detector passes");
        sim->callback([&] {
            std::filesystem::create_directories(sm_dir);
            ColonyConfig ccfg;
            ccfg.seed = cfg.seed;
            ccfg.tile_size = cfg.tile_size;
            ccfg.gsd_m_per_px = cfg.gsd_m_per_px;
            const SimulationRun run = run_pipeline(ccfg, DetectorNoise{}, cfg.passes,
                                                   cfg.burrow_conf_threshold);
            const auto p = [&](const char* name) { return sm_dir + "/" + name; };
            write_plan_json(run.plan, p("plan.json"));
            write_detections_jsonl(ground_truth_detections(run.gt, ccfg), p("gt.jsonl"), true);
            std::vector<Detection> all;
            for (const auto& pass : run.passes) all.insert(all.end(), pass.begin(), pass.end());
            write_detections_jsonl(all, p("detections.jsonl"), true);
            write_pool(run.pool, p("pool.txt"));
            write_scores_csv(run.tta_scores, p("tta_scores.csv"), "uncertainty");
            write_scores_csv(run.uscores, p("uscores.csv"), "u_score");
            emit_manifest("simulate", {},
                          {p("plan.json"), p("gt.jsonl"), p("detections.jsonl"), p("pool.txt"),
                           p("tta_scores.csv"), p("uscores.csv")},
                          cfg, cfg.seed);
            std::cout << run.plan.tiles.size() << " tiles, " << run.gt.burrows.size()
                      << " burrows, " << run.gt.animals.size() << " animals, pool "
                      << run.pool.size() << "\n";
        });

        // ---- evaluate ------------------------------------------------------
        auto* ev = app.add_subcommand("evaluate",
                                      "compare acquisition strategies on synthetic colonies");
        std::vector<std::size_t> e_budgets = {100, 500, 1000};
        int e_seeds = 20;
        std::string e_out;
        bool e_all = false;
        std::string e_strategy = "geo_uscore";
        ev->add_flag("--all-strategies", e_all, "evaluate all four strategies");
        ev->add_option("--strategy", e_strategy, "single strategy to evaluate");
        ev->add_option("--k", e_budgets, "annotation budgets")->delimiter(',');
        ev->add_option("--seeds", e_seeds, "number of colony seeds");
        ev->add_option("--passes", cfg.passes, "detector passes");
        ev->add_option("--out", e_out, "metrics CSV")->required();
        ev->callback([&] {
            std::vector<Strategy> strategies;
            if (e_all)
                strategies = {Strategy::random, Strategy::geo_random, Strategy::geo_tta,
                              Strategy::geo_uscore};
            else
                strategies = {strategy_from_name(e_strategy)};
            std::ofstream out(e_out);
            if (!out) throw std::runtime_error("cannot open " + e_out);
            out << "strategy,k,seed,animals_captured,animal_tile_recall,pool_size_frac,"
                   "selected\n";
            for (int s = 0; s < e_seeds; ++s) {
                ColonyConfig ccfg;
                ccfg.seed = cfg.seed + s;
                const SimulationRun run =
                    run_pipeline(ccfg, DetectorNoise{}, cfg.passes, cfg.burrow_conf_threshold);
                for (Strategy strat : strategies) {
                    for (std::size_t k : e_budgets) {
                        const StrategyMetrics m = evaluate_strategy(run, strat, k, ccfg.seed);
                        out << strategy_name(strat) << "," << k << "," << ccfg.seed << ","
                            << m.animals_captured << "," << m.animal_tile_recall << ","
                            << m.pool_size_frac << "," << m.selected << "\n";
                    }
                }
            }
            emit_manifest("evaluate", {}, {e_out}, cfg, cfg.seed);
        });

        // ---- heatmap -------------------------------------------------------
        auto* hm = app.add_subcommand("heatmap",
                                      "channel-mean activation map of a feature tensor");
        std::string h_in, h_out;
        hm->add_option("--features", h_in, "feature map file")->required();
        hm->add_option("--out", h_out, "grayscale PNG")->required();
        hm->callback([&] {
            const FeatureMap f = read_feature_map(h_in);
            const std::vector<double> heat = channel_mean_heatmap(f);
            RgbImage img(f.W, f.H);
            for (int y = 0; y < f.H; ++y)
                for (int x = 0; x < f.W; ++x)
                    for (int ch = 0; ch < 3; ++ch)
                        img.at(x, y, ch) = heat[static_cast<std::size_t>(y) * f.W + x];
            save_png(img, h_out);
            emit_manifest("heatmap", {h_in}, {h_out}, cfg, cfg.seed);
        });

        CLI11_PARSE(app, argc, argv);
        (void)jobs;
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", e.what()}, {"kind", "validation"}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"kind", "io"}}.dump() << "\n";
        return 2;
    }
}
