// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sceneforge/pointcloud.hpp"

namespace sceneforge {

using Embedding = Eigen::VectorXd;

struct Tensor {
    std::string name;
    Eigen::MatrixXd value;
};

/// Per-point MLP (3 -> h -> h, leaky ReLU), max-pool over points, linear
/// projection to dim, l2 normalization.
class ToyPointEncoder {
public:
    enum Index { W1, B1, W2, B2, W3, B3 };

    ToyPointEncoder(int hidden, int dim, std::uint64_t seed);
    explicit ToyPointEncoder(std::vector<Tensor> params);

    struct Cache {
        Eigen::VectorXd pooled;
        std::vector<Eigen::Index> argmax;  // winning point per hidden unit
        double norm = 0.0;                 // |W3 pooled + b3| before normalization
        Embedding out;
    };

    Embedding encode(const PointCloud& cloud) const;
    Embedding forward(const PointCloud& cloud, Cache& cache) const;

    /// Accumulates d(loss)/d(params) into `grads` (same layout as params()).
    void backward(const PointCloud& cloud, const Cache& cache, const Embedding& d_out,
                  std::vector<Tensor>& grads) const;

    std::vector<Tensor> zero_grads() const;
    std::vector<Tensor>& params() { return params_; }
    const std::vector<Tensor>& params() const { return params_; }

    int hidden() const { return static_cast<int>(params_[B1].value.rows()); }
    int dim() const { return static_cast<int>(params_[B3].value.rows()); }

    static constexpr double kLeak = 0.1;

private:
    std::vector<Tensor> params_;
};

/// Hashed bag of unigrams and bigrams over a fixed Gaussian table,
/// mean-pooled and l2 normalized. Never trained.
class FrozenTextEncoder {
public:
    FrozenTextEncoder(int dim, std::uint64_t seed, std::size_t table_rows = 1u << 14, bool bigrams = false);

    Embedding encode(const std::string& text) const;
    std::vector<std::string> tokens(const std::string& text) const;
    std::uint64_t checksum() const;
    int dim() const { return static_cast<int>(table_.cols()); }

private:
    Eigen::MatrixXd table_;
    std::uint64_t seed_;
    bool bigrams_;
};

/// 8x8x8 occupancy of the normalized object through a fixed random map.
class FrozenImageSurrogate {
public:
    static constexpr int kGrid = 8;

    FrozenImageSurrogate(int dim, std::uint64_t seed);

    Embedding encode(const PointCloud& object) const;
    static Eigen::VectorXd occupancy(const PointCloud& object);
    std::uint64_t checksum() const;

private:
    Eigen::MatrixXd map_;
};

std::uint64_t checksum(const Eigen::MatrixXd& m, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t checksum(const std::vector<Tensor>& tensors);

double cosine(const Embedding& a, const Embedding& b);

}  // namespace sceneforge
