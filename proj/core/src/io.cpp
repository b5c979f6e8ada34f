#include "survey/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace survey {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

}  // namespace

void write_detections_jsonl(const std::vector<Detection>& dets, const std::string& path,
                            bool mosaic_frame) {
    auto out = open_out(path);
    for (const auto& d : dets) {
        json j{{"tile_id", d.tile_id},
               {"class", class_name(d.class_id)},
               {"x_min", d.bbox.x_min},
               {"y_min", d.bbox.y_min},
               {"x_max", d.bbox.x_max},
               {"y_max", d.bbox.y_max},
               {"confidence", d.confidence}};
        if (d.pass_id) j["pass_id"] = *d.pass_id;
        if (mosaic_frame) j["frame"] = "mosaic";
        out << j.dump() << '\n';
    }
}

std::vector<Detection> read_detections_jsonl(const std::string& path, bool* mosaic_frame) {
    auto in = open_in(path);
    std::vector<Detection> dets;
    bool mosaic = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        Detection d(BBox(j.at("x_min").get<double>(), j.at("y_min").get<double>(),
                         j.at("x_max").get<double>(), j.at("y_max").get<double>()),
                    class_from_name(j.at("class").get<std::string>()),
                    j.at("confidence").get<double>());
        if (j.contains("pass_id")) d.pass_id = j["pass_id"].get<int>();
        if (j.contains("tile_id")) d.tile_id = j["tile_id"].get<std::string>();
        if (j.value("frame", "tile") == std::string("mosaic")) mosaic = true;
        dets.push_back(std::move(d));
    }
    if (mosaic_frame) *mosaic_frame = mosaic;
    return dets;
}

void write_plan_csv(const TilePlan& plan, const std::string& path) {
    auto out = open_out(path);
    out << "tile_id,x0,y0\n";
    for (const auto& t : plan.tiles) out << t.tile_id << ',' << t.x0 << ',' << t.y0 << '\n';
}

void write_plan_json(const TilePlan& plan, const std::string& path) {
    json tiles = json::array();
    for (const auto& t : plan.tiles) {
        json jt{{"tile_id", t.tile_id}, {"x0", t.x0}, {"y0", t.y0}};
        if (t.has_annotations) jt["has_annotations"] = *t.has_annotations;
        tiles.push_back(std::move(jt));
    }
    const json j{{"mosaic_w", plan.mosaic_w},
                 {"mosaic_h", plan.mosaic_h},
                 {"tile_size", plan.tile_size},
                 {"overlap_frac", plan.overlap_frac},
                 {"tiles", std::move(tiles)}};
    open_out(path) << j.dump(2) << '\n';
}

TilePlan read_plan_json(const std::string& path) {
    json j;
    open_in(path) >> j;
    TilePlan plan;
    plan.mosaic_w = j.at("mosaic_w").get<int>();
    plan.mosaic_h = j.at("mosaic_h").get<int>();
    plan.tile_size = j.at("tile_size").get<int>();
    plan.overlap_frac = j.at("overlap_frac").get<double>();
    for (const auto& jt : j.at("tiles")) {
        TileRef t;
        t.tile_id = jt.at("tile_id").get<std::string>();
        t.x0 = jt.at("x0").get<int>();
        t.y0 = jt.at("y0").get<int>();
        if (jt.contains("has_annotations")) t.has_annotations = jt["has_annotations"].get<bool>();
        plan.tiles.push_back(std::move(t));
    }
    return plan;
}

void write_scores_csv(const std::map<std::string, double>& scores, const std::string& path,
                      const std::string& value_column) {
    auto out = open_out(path);
    out << "tile_id," << value_column << '\n';
    out.precision(17);
    for (const auto& [id, v] : scores) out << id << ',' << v << '\n';
}

std::map<std::string, double> read_scores_csv(const std::string& path) {
    auto in = open_in(path);
    std::map<std::string, double> scores;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("malformed scores CSV line: " + line);
        scores[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    }
    return scores;
}

void write_pool(const std::set<std::string>& pool, const std::string& path) {
    auto out = open_out(path);
    for (const auto& id : pool) out << id << '\n';
}

std::set<std::string> read_pool(const std::string& path) {
    auto in = open_in(path);
    std::set<std::string> pool;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) pool.insert(line);
    return pool;
}

void write_batch_json(const AcquisitionBatch& batch, const std::string& path) {
    json tiles = json::array();
    for (const auto& [id, score] : batch.tiles) tiles.push_back({{"tile_id", id}, {"score", score}});
    const json j{{"strategy", strategy_name(batch.strategy)},
                 {"budget", batch.budget},
                 {"seed", batch.seed},
                 {"truncated_pool", batch.truncated_pool},
                 {"tiles", std::move(tiles)}};
    open_out(path) << j.dump(2) << '\n';
}

AcquisitionBatch read_batch_json(const std::string& path) {
    json j;
    open_in(path) >> j;
    AcquisitionBatch batch;
    batch.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    batch.budget = j.at("budget").get<std::size_t>();
    batch.seed = j.at("seed").get<std::uint64_t>();
    batch.truncated_pool = j.value("truncated_pool", false);
    for (const auto& jt : j.at("tiles"))
        batch.tiles.emplace_back(jt.at("tile_id").get<std::string>(),
                                 jt.at("score").get<double>());
    return batch;
}

void write_feature_map(const FeatureMap& f, const std::string& path) {
    auto out = open_out(path);
    const json header{{"C", f.C}, {"H", f.H}, {"W", f.W}};
    out << header.dump() << '\n';
    std::vector<float> buf(f.values.begin(), f.values.end());
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

FeatureMap read_feature_map(const std::string& path) {
    auto in = open_in(path);
    std::string header_line;
    if (!std::getline(in, header_line))
        throw std::runtime_error("feature map missing header: " + path);
    const json header = json::parse(header_line);
    FeatureMap f(header.at("C").get<int>(), header.at("H").get<int>(), header.at("W").get<int>());
    std::vector<float> buf(f.size());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != buf.size() * sizeof(float))
        throw std::runtime_error("feature map truncated: " + path);
    std::copy(buf.begin(), buf.end(), f.values.begin());
    return f;
}

std::uint64_t fnv1a_hash(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_manifest(const Manifest& m, const std::string& path) {
    json config = m.config_json.empty() ? json::object() : json::parse(m.config_json);
    const json j{{"subcommand", m.subcommand},
                 {"inputs", m.inputs},
                 {"outputs", m.outputs},
                 {"config", std::move(config)},
                 {"config_hash", fnv1a_hash(m.config_json)},
                 {"seed", m.seed},
                 {"version", m.version}};
    open_out(path) << j.dump(2) << '\n';
}

}  // namespace survey
