// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sceneforge/pointcloud.hpp"

namespace sceneforge {

struct DatasetEntry {
    std::string id;
    std::filesystem::path cloud_path;
    std::string caption;
};

/// On-disk layout: <root>/objects/<id>.ply and <root>/captions.jsonl with one
/// {"id": ..., "caption": ...} object per line.
struct DatasetIndex {
    std::filesystem::path root;
    std::vector<DatasetEntry> entries;

    std::size_t cardinality() const { return entries.size(); }
};

DatasetIndex load_dataset(const std::filesystem::path& root);

/// Reads every cloud referenced by the index, in index order.
std::vector<CaptionedObject> load_objects(const DatasetIndex& index);

/// Writes objects/<id>.ply plus captions.jsonl under root, returning the index.
DatasetIndex write_dataset(const std::filesystem::path& root,
                           const std::vector<CaptionedObject>& objects);

}  // namespace sceneforge
