// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sceneforge/batcher.hpp"

namespace sceneforge {

class PipelineError : public Error {
public:
    PipelineError(std::size_t batch_index, const std::string& what)
        : Error(ErrorCode::Pipeline, "batch " + std::to_string(batch_index) + ": " + what),
          batch_index_(batch_index) {}
    std::size_t batch_index() const noexcept { return batch_index_; }

private:
    std::size_t batch_index_;
};

struct PipelineStats {
    std::size_t delivered = 0;
    bool stopped_early = false;
    std::vector<double> assembly_ms;           // by batch index; 0 for batches never built
    std::vector<std::size_t> occupancy;        // ready-queue length, sampled at every insert and take
    std::size_t max_occupancy = 0;
};

/// Returning false stops the pipeline after the current batch.
using BatchConsumer = std::function<bool(Batch&&)>;
using BatchProducer = std::function<Batch(std::size_t index)>;

/// `workers` producers build batches 0..num_batches-1 and a reorder buffer
/// hands them to `consume` in index order on the calling thread. While batch
/// t is being consumed, producers may work at most up to t+depth, so the
/// ready queue never holds more than `depth` batches.
PipelineStats run_pipeline(const BatchProducer& produce, std::size_t num_batches, std::size_t workers,
                           std::size_t depth, const BatchConsumer& consume);

PipelineStats run_pipeline(const BatchConfig& cfg, const BatchSource& source, const SceneForge& forge,
                           std::size_t num_batches, const BatchConsumer& consume);

}  // namespace sceneforge
