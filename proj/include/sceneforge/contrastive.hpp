// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sceneforge/common.hpp"

namespace sceneforge {

inline constexpr double kInitTemperature = 0.07;
inline constexpr double kMinTemperature = 0.01;
inline constexpr double kMaxTemperature = 1.0;

struct InfoNceResult {
    double loss = 0.0;
    Eigen::MatrixXd grad_anchors;  // same shape as the inputs, zero outside the subset
    Eigen::MatrixXd grad_targets;
    double grad_log_tau = 0.0;
};

/// Rows are samples. Anchor i is contrasted against every target in
/// `subset`; the positive is target i.
InfoNceResult info_nce(const Eigen::MatrixXd& anchors, const Eigen::MatrixXd& targets,
                       std::span<const std::size_t> subset, double log_tau);

struct LossConfig {
    double log_tau = std::log(kInitTemperature);
    double alpha = 0.5;
    bool dynamic_budget = false;  // B/|S_s| per batch instead of 1/(1-alpha)
};

struct TotalLossResult {
    double total = 0.0;
    double txt3d = 0.0;     // half the symmetric text/3D loss over all samples
    double img3d = 0.0;     // half the symmetric 2D/3D loss over singles, unweighted
    double weight_2d = 0.0;
    Eigen::MatrixXd grad_3d;          // d total / d 3D embeddings
    Eigen::MatrixXd grad_3d_img;      // contribution of the weighted 2D block alone
    double grad_log_tau = 0.0;
};

/// Rows of `emb_2d` belonging to composed samples are never read.
TotalLossResult total_loss(const Eigen::MatrixXd& emb_3d, const Eigen::MatrixXd& emb_txt,
                           const Eigen::MatrixXd& emb_2d, const std::vector<bool>& composed, const LossConfig& cfg);

/// 1/(1-alpha), or B/|S_s| when dynamic. Errors on alpha == 1 with singles present.
double block_weight_2d(double alpha, std::size_t batch, std::size_t singles, bool dynamic);

double clamp_log_tau(double log_tau);

}  // namespace sceneforge
