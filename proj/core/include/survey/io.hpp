#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "survey/consistency.hpp"
#include "survey/geo.hpp"
#include "survey/geometry.hpp"
#include "survey/tiling.hpp"

namespace survey {

// Detection records as JSON-lines:
//   {"tile_id":..,"class":..,"x_min":..,"y_min":..,"x_max":..,"y_max":..,
//    "confidence":..,"pass_id":..?,"frame":"tile"|"mosaic"?}
// Coordinates are tile-local unless the mosaic-frame flag is set.
void write_detections_jsonl(const std::vector<Detection>& dets, const std::string& path,
                            bool mosaic_frame = false);
std::vector<Detection> read_detections_jsonl(const std::string& path,
                                             bool* mosaic_frame = nullptr);

// Tile plans: CSV (tile_id,x0,y0) plus a JSON form carrying the plan header.
void write_plan_csv(const TilePlan& plan, const std::string& path);
void write_plan_json(const TilePlan& plan, const std::string& path);
TilePlan read_plan_json(const std::string& path);

// Tabular per-tile scores, CSV with a header row.
void write_scores_csv(const std::map<std::string, double>& scores, const std::string& path,
                      const std::string& value_column = "score");
std::map<std::string, double> read_scores_csv(const std::string& path);

// Candidate pools: one tile_id per line.
void write_pool(const std::set<std::string>& pool, const std::string& path);
std::set<std::string> read_pool(const std::string& path);

void write_batch_json(const AcquisitionBatch& batch, const std::string& path);
AcquisitionBatch read_batch_json(const std::string& path);

// Feature maps: one JSON header line {"C":..,"H":..,"W":..} followed by raw
// little-endian float32 values, channel-major.
void write_feature_map(const FeatureMap& f, const std::string& path);
FeatureMap read_feature_map(const std::string& path);

// Run manifest written beside every CLI output: inputs, config hash, seed.
struct Manifest {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string config_json;  // serialized effective configuration
    std::uint64_t seed = 0;
    std::string version = "0.1.0";
};

std::uint64_t fnv1a_hash(const std::string& data);
void write_manifest(const Manifest& m, const std::string& path);

}  // namespace survey
