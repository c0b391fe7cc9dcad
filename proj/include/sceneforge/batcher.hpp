// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sceneforge/encoders.hpp"
#include "sceneforge/scene_forge.hpp"

namespace sceneforge {

using BigInt = boost::multiprecision::cpp_int;

struct BatchConfig {
    std::size_t batch_size = 64;
    double alpha = 0.5;
    std::size_t max_objects = 3;  // N
    std::size_t target_points = 10000;
    std::size_t prefetch_depth = 4;  // M
    std::size_t workers = 1;
    std::uint64_t global_seed = 0;
    std::uint64_t epoch = 0;

    void validate() const;
};

struct Sample {
    PointCloud cloud;
    std::string caption;
    bool composed = false;
    std::optional<Embedding> surrogate_2d;  // present iff !composed
    std::size_t num_objects = 1;
    std::size_t anchor = 0;
};

struct Batch {
    std::size_t index = 0;
    std::vector<Sample> samples;
};

/// Objects plus their frozen 2D surrogates, computed once up front.
struct BatchSource {
    ObjectSet objects;
    std::vector<Embedding> surrogates;
};

BatchSource make_batch_source(ObjectSet objects, const FrozenImageSurrogate& surrogate);

Sample assemble_sample(std::size_t batch_index, std::size_t sample_index, const BatchConfig& cfg,
                       const BatchSource& source, const SceneForge& forge);

/// Every sample draws from its own RNG seeded by
/// (global_seed, epoch, batch_index, sample_index).
Batch assemble_batch(std::size_t index, const BatchConfig& cfg, const BatchSource& source, const SceneForge& forge);

/// sum_{k=1..N} D!/(D-k)! * 3^(k-1)
BigInt count_configurations(std::uint64_t d, std::uint64_t n);

}  // namespace sceneforge
