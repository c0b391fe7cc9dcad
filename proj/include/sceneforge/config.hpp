// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "sceneforge/augment.hpp"
#include "sceneforge/batcher.hpp"
#include "sceneforge/compose_baselines.hpp"
#include "sceneforge/eval.hpp"
#include "sceneforge/refiner.hpp"
#include "sceneforge/relations.hpp"
#include "sceneforge/trainer.hpp"

namespace sceneforge {

// A small TOML subset: [section] / [a.b] headers, `key = value` with basic
// strings, integers, floats, booleans and single-line arrays; `#` comments.
using ConfigScalar = std::variant<bool, std::int64_t, double, std::string>;
struct ConfigValue {
    std::variant<bool, std::int64_t, double, std::string, std::vector<ConfigScalar>> value;
    int line = 0;
};
using ConfigTable = std::map<std::string, ConfigValue>;  // keyed by dotted path

ConfigTable parse_config_text(const std::string& text);

struct AppConfig {
    std::string dataset_root;
    std::string output_dir = "out";
    std::string log_level = "info";

    AugmentPolicies augment;
    PlacementParams placement;
    RefinerConfig refiner;
    BatchConfig batch;
    SubsampleMethod subsample_method = SubsampleMethod::Uniform;
    std::string k_distribution = "uniform";
    LossConfig loss;
    TrainConfig train;

    std::size_t eval_target_points = 1024;
    std::uint64_t eval_seed = 0;
    PredicateParams predicate;
    RepositionOptions reposition;

    MixupMatching mixup_matching = MixupMatching::Greedy;
    double mix_lambda = -1.0;  // negative: draw from Beta(1, 1) per sample

    void validate() const;
};

/// Unknown sections or keys and mistyped values are errors.
AppConfig config_from_table(const ConfigTable& table, AppConfig base = {});
AppConfig load_config(const std::filesystem::path& path);

/// The documented defaults, as a config file.
std::string default_config_text();

}  // namespace sceneforge
