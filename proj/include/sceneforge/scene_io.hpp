// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sceneforge/eval.hpp"
#include "sceneforge/scene_forge.hpp"

namespace sceneforge {

/// One line of scenes.jsonl. Clouds live next to it in scenes/<scene_id>.ply.
struct SceneRecord {
    std::string scene_id;
    std::vector<std::string> components;
    std::vector<std::string> relations;  // "over" | "under" | "next to"
    std::string raw_caption;
    std::string refined_caption;
    std::uint64_t seed = 0;
    std::size_t target_points = 0;
    std::string method = "sceneforge";
    double lambda = -1.0;  // baseline compositors only
};

SceneRecord record_of(const ComposedScene& scene);
std::string to_json_line(const SceneRecord& r);
SceneRecord parse_scene_record(const std::string& line, std::size_t line_no = 0);

std::vector<SceneRecord> read_scene_records(const std::filesystem::path& jsonl);

/// Rebuilds the composition spec of a sceneforge record from the object set.
CompositionSpec spec_from_record(const SceneRecord& r, const ObjectSet& objects);

/// Writes scenes.jsonl and scenes/<id>.ply under `dir`.
void write_scene_dir(const std::filesystem::path& dir, const std::vector<SceneRecord>& records,
                     const std::vector<PointCloud>& clouds);

/// Reads a scene directory back as an evaluation set (captions: refined).
NComposedDataset read_scene_dir(const std::filesystem::path& dir);

}  // namespace sceneforge
