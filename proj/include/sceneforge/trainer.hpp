// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sceneforge/batcher.hpp"
#include "sceneforge/contrastive.hpp"
#include "sceneforge/encoders.hpp"

namespace sceneforge {

struct TrainConfig {
    std::size_t epochs = 30;
    double lr = 0.05;
    double momentum = 0.9;
    std::size_t batches_per_epoch = 0;  // 0: ceil(D / batch_size)
    int hidden = 64;
    int dim = 32;
    std::uint64_t frozen_seed = 1234;
    std::uint64_t init_seed = 0;
    bool learn_tau = true;
    bool dynamic_budget = false;

    void validate() const;
};

/// The frozen side of the model: text encoder and 2D surrogate.
struct FrozenEncoders {
    FrozenEncoders(int dim, std::uint64_t seed) : text(dim, seed), image(dim, seed), seed(seed) {}

    FrozenTextEncoder text;
    FrozenImageSurrogate image;
    std::uint64_t seed;

    std::uint64_t checksum() const { return text.checksum() ^ (image.checksum() * 0x9e3779b97f4a7c15ULL); }
};

struct ToyModel {
    ToyPointEncoder encoder;
    double log_tau = std::log(kInitTemperature);
    std::uint64_t frozen_seed = 0;
};

struct EpochMetrics {
    std::size_t epoch = 0;
    double loss_txt3d = 0.0;
    double loss_2d3d = 0.0;
    double total = 0.0;
    double top1_retrieval = 0.0;  // in-batch, averaged over both directions
};

struct StepResult {
    TotalLossResult loss;
    std::vector<Tensor> grads;
    double top1 = 0.0;
};

class Trainer {
public:
    Trainer(TrainConfig cfg, double alpha, const FrozenEncoders& frozen);
    Trainer(TrainConfig cfg, double alpha, const FrozenEncoders& frozen, ToyModel init);

    /// One SGD step on `batch`; returns the loss and gradients that were applied.
    StepResult step(const Batch& batch);

    const ToyModel& model() const { return model_; }
    const TrainConfig& config() const { return cfg_; }

private:
    const Embedding& text_embedding(const std::string& caption);

    TrainConfig cfg_;
    double alpha_;
    const FrozenEncoders& frozen_;
    ToyModel model_;
    std::vector<Tensor> velocity_;
    double tau_velocity_ = 0.0;
    std::unordered_map<std::string, Embedding> text_cache_;
};

struct TrainResult {
    ToyModel model;
    std::vector<EpochMetrics> metrics;
};

/// Trains on batches drawn from the pipeline. The frozen encoders are
/// checksummed before and after; any change is an error.
TrainResult train_toy(const TrainConfig& cfg, BatchConfig batch, const ObjectSet& objects, const SceneForge& forge,
                      const FrozenEncoders& frozen, const std::function<void(const EpochMetrics&)>& on_epoch = {});

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochMetrics>& rows);

/// Averaged top-1 of in-batch retrieval for a pair of normalized embedding sets.
double in_batch_top1(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace sceneforge
