// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "sceneforge/config.hpp"
#include "sceneforge/eval.hpp"
#include "sceneforge/scene_forge.hpp"
#include "sceneforge/trainer.hpp"

namespace sceneforge {

// Glue shared by the command-line tool and the end-to-end checks.

ObjectSet load_object_set(const std::filesystem::path& root);

/// Captions are refined through cfg.refiner unless geometry_only.
SceneForge make_forge(const AppConfig& cfg, bool geometry_only = false);

/// Trains one toy model; `seed` drives batch sampling and initialization.
TrainResult train_model(const AppConfig& cfg, const ObjectSet& objects, const SceneForge& forge, double alpha,
                        std::size_t max_objects, std::uint64_t seed,
                        const std::function<void(const EpochMetrics&)>& on_epoch = {});

CloudEncoderFn cloud_encoder(const ToyModel& model);
TextEncoderFn text_encoder(const FrozenEncoders& frozen);

struct AlphaSweepRow {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    double top1_n1 = 0.0;
    double top1_n3 = 0.0;
    double mixed = 0.0;  // mean averaged top-1 over n = 1 and n = 3
};

std::vector<AlphaSweepRow> sweep_alpha(const AppConfig& cfg, const ObjectSet& objects, std::span<const double> alphas,
                                       std::span<const std::uint64_t> seeds);
void write_alpha_csv(const std::filesystem::path& path, const std::vector<AlphaSweepRow>& rows);

struct RepositionTrial {
    ComposedScene scene;        // two components
    Relation target = Relation::Over;
    std::string target_caption;  // rule-refined caption with the target relation
};

/// Two-object scenes composed with a relation other than the target.
std::vector<RepositionTrial> make_reposition_trials(const ObjectSet& objects, const SceneForge& forge,
                                                    std::size_t count, std::size_t target_points, std::uint64_t seed);

}  // namespace sceneforge
