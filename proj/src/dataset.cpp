// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/dataset.hpp"

#include <fstream>
#include <unordered_set>

#include "json.hpp"

#include "sceneforge/ply.hpp"

namespace sceneforge {

namespace fs = std::filesystem;

DatasetIndex load_dataset(const fs::path& root) {
    const fs::path objects = root / "objects";
    const fs::path captions = root / "captions.jsonl";

    bool any_cloud = false;
    if (fs::is_directory(objects)) {
        for (const auto& e : fs::directory_iterator(objects)) {
            if (e.is_regular_file() && e.path().extension() == ".ply") {
                any_cloud = true;
                break;
            }
        }
    }
    if (!any_cloud) throw Error(ErrorCode::EmptyDataset, "no .ply files under " + objects.string());

    std::ifstream in(captions);
    if (!in) throw Error(ErrorCode::MissingCaptions, "missing " + captions.string());

    DatasetIndex index;
    index.root = root;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::MalformedJsonl,
                        captions.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("caption") || !j["id"].is_string() ||
            !j["caption"].is_string())
            throw Error(ErrorCode::MalformedJsonl, captions.string() + ":" + std::to_string(line_no) +
                                                       ": expected {\"id\": string, \"caption\": string}");
        DatasetEntry entry{j["id"].get<std::string>(), {}, j["caption"].get<std::string>()};
        if (!seen.insert(entry.id).second) throw Error(ErrorCode::DuplicateId, "DuplicateId(\"" + entry.id + "\")");
        entry.cloud_path = objects / (entry.id + ".ply");
        if (!fs::is_regular_file(entry.cloud_path))
            throw Error(ErrorCode::MissingCloud, "caption id '" + entry.id + "' has no cloud file " +
                                                     entry.cloud_path.string());
        index.entries.push_back(std::move(entry));
    }
    if (index.entries.empty()) throw Error(ErrorCode::EmptyDataset, captions.string() + " has no entries");
    return index;
}

std::vector<CaptionedObject> load_objects(const DatasetIndex& index) {
    std::vector<CaptionedObject> out;
    out.reserve(index.cardinality());
    for (const auto& e : index.entries) {
        CaptionedObject obj{read_cloud(e.cloud_path), e.caption};
        obj.cloud.id = e.id;
        obj.validate();
        out.push_back(std::move(obj));
    }
    return out;
}

DatasetIndex write_dataset(const fs::path& root, const std::vector<CaptionedObject>& objects) {
    std::error_code ec;
    fs::create_directories(root / "objects", ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + (root / "objects").string() + ": " + ec.message());
    std::ofstream captions(root / "captions.jsonl", std::ios::trunc);
    if (!captions) throw Error(ErrorCode::Io, "cannot write " + (root / "captions.jsonl").string());

    DatasetIndex index;
    index.root = root;
    for (const auto& obj : objects) {
        const auto path = root / "objects" / (obj.cloud.id + ".ply");
        write_cloud(path, obj.cloud);
        captions << nlohmann::json{{"id", obj.cloud.id}, {"caption", obj.caption}}.dump() << '\n';
        index.entries.push_back({obj.cloud.id, path, obj.caption});
    }
    if (!captions) throw Error(ErrorCode::Io, "short write to " + (root / "captions.jsonl").string());
    return index;
}

}  // namespace sceneforge
