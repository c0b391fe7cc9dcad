// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/contrastive.hpp"

#include <algorithm>

namespace sceneforge {

namespace {

void check_normalized(const Eigen::MatrixXd& m, std::span<const std::size_t> subset, const char* what) {
    for (auto i : subset) {
        const double n = m.row(static_cast<Eigen::Index>(i)).norm();
        if (std::abs(n - 1.0) > 1e-4)
            throw Error(ErrorCode::UnnormalizedEmbedding,
                        std::string(what) + " row " + std::to_string(i) + " has norm " + std::to_string(n));
    }
}

}  // namespace

double clamp_log_tau(double log_tau) {
    return std::clamp(log_tau, std::log(kMinTemperature), std::log(kMaxTemperature));
}

InfoNceResult info_nce(const Eigen::MatrixXd& anchors, const Eigen::MatrixXd& targets,
                       std::span<const std::size_t> subset, double log_tau) {
    if (subset.empty()) throw Error(ErrorCode::InvalidArgument, "info_nce needs a non-empty subset");
    if (anchors.rows() != targets.rows() || anchors.cols() != targets.cols())
        throw Error(ErrorCode::SizeMismatch, "anchor and target matrices differ in shape");
    for (auto i : subset) {
        if (i >= static_cast<std::size_t>(anchors.rows()))
            throw Error(ErrorCode::InvalidArgument, "subset index out of range");
    }
    check_normalized(anchors, subset, "anchor");
    check_normalized(targets, subset, "target");

    const auto s = static_cast<Eigen::Index>(subset.size());
    const double tau = std::exp(log_tau);
    Eigen::MatrixXd a(s, anchors.cols()), t(s, targets.cols());
    for (Eigen::Index i = 0; i < s; ++i) {
        a.row(i) = anchors.row(static_cast<Eigen::Index>(subset[i]));
        t.row(i) = targets.row(static_cast<Eigen::Index>(subset[i]));
    }
    const Eigen::MatrixXd logits = (a * t.transpose()) / tau;

    InfoNceResult r;
    Eigen::MatrixXd g(s, s);  // d loss / d logits
    for (Eigen::Index i = 0; i < s; ++i) {
        const double m = logits.row(i).maxCoeff();
        const Eigen::RowVectorXd e = (logits.row(i).array() - m).exp().matrix();
        const double z = e.sum();
        r.loss += -(logits(i, i) - m - std::log(z));
        g.row(i) = e / z;
        g(i, i) -= 1.0;
    }
    r.loss /= static_cast<double>(s);
    g /= static_cast<double>(s);

    const Eigen::MatrixXd ga = g * t / tau;
    const Eigen::MatrixXd gt = g.transpose() * a / tau;
    r.grad_log_tau = -(g.array() * logits.array()).sum();
    r.grad_anchors = Eigen::MatrixXd::Zero(anchors.rows(), anchors.cols());
    r.grad_targets = Eigen::MatrixXd::Zero(targets.rows(), targets.cols());
    for (Eigen::Index i = 0; i < s; ++i) {
        r.grad_anchors.row(static_cast<Eigen::Index>(subset[i])) += ga.row(i);
        r.grad_targets.row(static_cast<Eigen::Index>(subset[i])) += gt.row(i);
    }
    return r;
}

double block_weight_2d(double alpha, std::size_t batch, std::size_t singles, bool dynamic) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
    if (singles == 0) return 0.0;
    if (dynamic) return static_cast<double>(batch) / static_cast<double>(singles);
    if (alpha >= 1.0)
        throw Error(ErrorCode::InconsistentConfig, "alpha == 1 but the batch holds single-object samples");
    return 1.0 / (1.0 - alpha);
}

TotalLossResult total_loss(const Eigen::MatrixXd& emb_3d, const Eigen::MatrixXd& emb_txt,
                           const Eigen::MatrixXd& emb_2d, const std::vector<bool>& composed, const LossConfig& cfg) {
    const auto b = static_cast<std::size_t>(emb_3d.rows());
    if (composed.size() != b || static_cast<std::size_t>(emb_txt.rows()) != b ||
        static_cast<std::size_t>(emb_2d.rows()) != b)
        throw Error(ErrorCode::SizeMismatch, "total_loss inputs disagree on batch size");

    std::vector<std::size_t> all(b), singles;
    for (std::size_t i = 0; i < b; ++i) {
        all[i] = i;
        if (!composed[i]) singles.push_back(i);
    }

    TotalLossResult r;
    const auto p2t = info_nce(emb_3d, emb_txt, all, cfg.log_tau);
    const auto t2p = info_nce(emb_txt, emb_3d, all, cfg.log_tau);
    r.txt3d = 0.5 * (p2t.loss + t2p.loss);
    r.grad_3d = 0.5 * (p2t.grad_anchors + t2p.grad_targets);
    r.grad_log_tau = 0.5 * (p2t.grad_log_tau + t2p.grad_log_tau);

    r.weight_2d = block_weight_2d(cfg.alpha, b, singles.size(), cfg.dynamic_budget);
    r.grad_3d_img = Eigen::MatrixXd::Zero(emb_3d.rows(), emb_3d.cols());
    if (!singles.empty()) {
        const auto p2i = info_nce(emb_3d, emb_2d, singles, cfg.log_tau);
        const auto i2p = info_nce(emb_2d, emb_3d, singles, cfg.log_tau);
        r.img3d = 0.5 * (p2i.loss + i2p.loss);
        r.grad_3d_img = r.weight_2d * 0.5 * (p2i.grad_anchors + i2p.grad_targets);
        r.grad_log_tau += r.weight_2d * 0.5 * (p2i.grad_log_tau + i2p.grad_log_tau);
    }
    r.grad_3d += r.grad_3d_img;
    r.total = r.txt3d + r.weight_2d * r.img3d;
    return r;
}

}  // namespace sceneforge
