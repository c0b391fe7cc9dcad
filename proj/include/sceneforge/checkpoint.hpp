// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "sceneforge/trainer.hpp"

namespace sceneforge {

// Layout: 8-byte magic "SFCKPT01", u64 little-endian header length, JSON
// header (tensor names, shapes, byte offsets, frozen_seed, dim, hidden,
// log_tau), then raw little-endian float64 tensor data, column-major.
std::string encode_checkpoint(const ToyModel& model);
ToyModel decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const ToyModel& model);
ToyModel load_checkpoint(const std::filesystem::path& path);

}  // namespace sceneforge
