// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/scene_io.hpp"

#include <fstream>
#include <unordered_map>

#include "json.hpp"
#include "sceneforge/ply.hpp"

namespace sceneforge {

namespace fs = std::filesystem;

SceneRecord record_of(const ComposedScene& scene) {
    SceneRecord r;
    r.scene_id = scene.scene_id;
    r.components = scene.component_ids();
    for (auto rel : scene.spec.relations) r.relations.emplace_back(phrase(rel));
    r.raw_caption = scene.raw_caption;
    r.refined_caption = scene.refined_caption;
    r.seed = scene.spec.seed;
    r.target_points = scene.spec.target_points;
    return r;
}

std::string to_json_line(const SceneRecord& r) {
    nlohmann::json j{{"scene_id", r.scene_id},
                     {"components", r.components},
                     {"relations", r.relations},
                     {"raw_caption", r.raw_caption},
                     {"refined_caption", r.refined_caption},
                     {"seed", r.seed},
                     {"target_points", r.target_points},
                     {"method", r.method}};
    if (r.lambda >= 0.0) j["lambda"] = r.lambda;
    return j.dump();
}

SceneRecord parse_scene_record(const std::string& line, std::size_t line_no) {
    try {
        const auto j = nlohmann::json::parse(line);
        SceneRecord r;
        r.scene_id = j.at("scene_id").get<std::string>();
        r.components = j.at("components").get<std::vector<std::string>>();
        r.relations = j.at("relations").get<std::vector<std::string>>();
        r.raw_caption = j.at("raw_caption").get<std::string>();
        r.refined_caption = j.at("refined_caption").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.target_points = j.value("target_points", std::size_t{0});
        r.method = j.value("method", std::string("sceneforge"));
        r.lambda = j.value("lambda", -1.0);
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedJsonl, "scenes.jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
}

std::vector<SceneRecord> read_scene_records(const fs::path& jsonl) {
    std::ifstream in(jsonl);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + jsonl.string());
    std::vector<SceneRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        out.push_back(parse_scene_record(line, n));
    }
    return out;
}

CompositionSpec spec_from_record(const SceneRecord& r, const ObjectSet& objects) {
    if (r.method != "sceneforge")
        throw Error(ErrorCode::InvalidSpec, "scene " + r.scene_id + " was made by " + r.method + ", not sceneforge");
    std::unordered_map<std::string, ObjectRef> by_id;
    for (const auto& o : objects) by_id.emplace(o->cloud.id, o);
    CompositionSpec spec;
    for (const auto& id : r.components) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw Error(ErrorCode::MissingCloud, "scene " + r.scene_id + " uses unknown object " + id);
        spec.components.push_back(it->second);
    }
    for (const auto& rel : r.relations) spec.relations.push_back(parse_relation(rel));
    spec.seed = r.seed;
    spec.target_points = r.target_points;
    spec.validate();
    return spec;
}

void write_scene_dir(const fs::path& dir, const std::vector<SceneRecord>& records,
                     const std::vector<PointCloud>& clouds) {
    if (records.size() != clouds.size()) throw Error(ErrorCode::LengthMismatch, "records and clouds differ in count");
    std::error_code ec;
    fs::create_directories(dir / "scenes", ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + (dir / "scenes").string() + ": " + ec.message());
    std::ofstream out(dir / "scenes.jsonl", std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / "scenes.jsonl").string());
    for (std::size_t i = 0; i < records.size(); ++i) {
        write_cloud(dir / "scenes" / (records[i].scene_id + ".ply"), clouds[i]);
        out << to_json_line(records[i]) << '\n';
    }
    if (!out) throw Error(ErrorCode::Io, "short write to " + (dir / "scenes.jsonl").string());
}

NComposedDataset read_scene_dir(const fs::path& dir) {
    const auto records = read_scene_records(dir / "scenes.jsonl");
    NComposedDataset ds;
    ds.n = 0;
    for (const auto& r : records) {
        EvalItem item;
        item.id = r.scene_id;
        item.cloud = read_cloud(dir / "scenes" / (r.scene_id + ".ply"));
        item.caption = r.refined_caption;
        item.component_ids = r.components;
        ds.n = std::max(ds.n, r.components.size());
        ds.scenes.push_back(std::move(item));
    }
    if (ds.scenes.empty()) throw Error(ErrorCode::EmptyDataset, "no scenes in " + dir.string());
    return ds;
}

}  // namespace sceneforge
