// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "sceneforge/pointcloud.hpp"

namespace sceneforge {

enum class PlyFormat { Ascii, BinaryLittleEndian };

// Vertex layout: float x, y, z and optionally uchar red, green, blue.
// Readers also accept double coordinates and ignore extra scalar vertex
// properties; list properties on vertices and big-endian files are rejected.

PointCloud read_cloud(const std::filesystem::path& path);
PointCloud parse_ply(const std::string& bytes, const std::string& id = {});

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud,
                 PlyFormat format = PlyFormat::BinaryLittleEndian);
std::string encode_ply(const PointCloud& cloud, PlyFormat format = PlyFormat::BinaryLittleEndian);

}  // namespace sceneforge
