// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/trainer.hpp"

#include <cmath>
#include <fstream>

#include <spdlog/spdlog.h>

#include "sceneforge/pipeline.hpp"

namespace sceneforge {

void TrainConfig::validate() const {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw Error(ErrorCode::InvalidArgument, "lr must be >= 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw Error(ErrorCode::InvalidArgument, "momentum must lie in [0, 1)");
    if (hidden < 1 || dim < 1) throw Error(ErrorCode::InvalidArgument, "hidden and dim must be >= 1");
}

Trainer::Trainer(TrainConfig cfg, double alpha, const FrozenEncoders& frozen)
    : Trainer(cfg, alpha, frozen, ToyModel{ToyPointEncoder(cfg.hidden, cfg.dim, cfg.init_seed),
                                           std::log(kInitTemperature), frozen.seed}) {}

Trainer::Trainer(TrainConfig cfg, double alpha, const FrozenEncoders& frozen, ToyModel init)
    : cfg_(std::move(cfg)), alpha_(alpha), frozen_(frozen), model_(std::move(init)) {
    cfg_.validate();
    if (model_.encoder.dim() != frozen_.text.dim())
        throw Error(ErrorCode::SizeMismatch, "point encoder and frozen encoders disagree on dim");
    velocity_ = model_.encoder.zero_grads();
}

const Embedding& Trainer::text_embedding(const std::string& caption) {
    auto it = text_cache_.find(caption);
    if (it == text_cache_.end()) it = text_cache_.emplace(caption, frozen_.text.encode(caption)).first;
    return it->second;
}

double in_batch_top1(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::MatrixXd sim = a * b.transpose();
    const auto n = sim.rows();
    if (n == 0) return 0.0;
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index r, c;
        sim.row(i).maxCoeff(&c);
        if (c == i) ++hits;
        sim.col(i).maxCoeff(&r);
        if (r == i) ++hits;
    }
    return static_cast<double>(hits) / (2.0 * static_cast<double>(n));
}

StepResult Trainer::step(const Batch& batch) {
    const auto b = static_cast<Eigen::Index>(batch.samples.size());
    const int dim = model_.encoder.dim();
    Eigen::MatrixXd e3(b, dim), et(b, dim), e2 = Eigen::MatrixXd::Zero(b, dim);
    std::vector<bool> composed(static_cast<std::size_t>(b));
    std::vector<ToyPointEncoder::Cache> caches(static_cast<std::size_t>(b));
    for (Eigen::Index i = 0; i < b; ++i) {
        const auto& s = batch.samples[static_cast<std::size_t>(i)];
        e3.row(i) = model_.encoder.forward(s.cloud, caches[static_cast<std::size_t>(i)]).transpose();
        et.row(i) = text_embedding(s.caption).transpose();
        composed[static_cast<std::size_t>(i)] = s.composed;
        if (s.surrogate_2d.has_value() == s.composed)
            throw Error(ErrorCode::InconsistentConfig, "2D surrogate must be present exactly for single samples");
        if (s.surrogate_2d) e2.row(i) = s.surrogate_2d->transpose();
    }

    LossConfig lc;
    lc.log_tau = model_.log_tau;
    lc.alpha = alpha_;
    lc.dynamic_budget = cfg_.dynamic_budget;

    StepResult out;
    out.loss = total_loss(e3, et, e2, composed, lc);
    if (!std::isfinite(out.loss.total)) throw Error(ErrorCode::Divergence, "loss is not finite");
    out.top1 = in_batch_top1(e3, et);

    out.grads = model_.encoder.zero_grads();
    for (Eigen::Index i = 0; i < b; ++i) {
        const Embedding g = out.loss.grad_3d.row(i).transpose();
        model_.encoder.backward(batch.samples[static_cast<std::size_t>(i)].cloud, caches[static_cast<std::size_t>(i)],
                                g, out.grads);
    }

    auto& params = model_.encoder.params();
    for (std::size_t t = 0; t < params.size(); ++t) {
        velocity_[t].value = cfg_.momentum * velocity_[t].value + out.grads[t].value;
        params[t].value -= cfg_.lr * velocity_[t].value;
    }
    if (cfg_.learn_tau) {
        tau_velocity_ = cfg_.momentum * tau_velocity_ + out.loss.grad_log_tau;
        model_.log_tau = clamp_log_tau(model_.log_tau - cfg_.lr * tau_velocity_);
    }
    return out;
}

TrainResult train_toy(const TrainConfig& cfg, BatchConfig batch, const ObjectSet& objects, const SceneForge& forge,
                      const FrozenEncoders& frozen, const std::function<void(const EpochMetrics&)>& on_epoch) {
    cfg.validate();
    batch.validate();
    const auto frozen_before = frozen.checksum();
    const BatchSource source = make_batch_source(objects, frozen.image);
    const std::size_t per_epoch = cfg.batches_per_epoch > 0
                                      ? cfg.batches_per_epoch
                                      : (objects.size() + batch.batch_size - 1) / batch.batch_size;

    // with N < 2 nothing can be composed, so the 2D block needs no budget correction
    Trainer trainer(cfg, batch.max_objects < 2 ? 0.0 : batch.alpha, frozen);
    std::vector<EpochMetrics> metrics;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        batch.epoch = epoch;
        EpochMetrics m;
        m.epoch = epoch + 1;
        std::size_t seen = 0;
        run_pipeline(batch, source, forge, per_epoch, [&](Batch&& bt) {
            const auto r = trainer.step(bt);
            m.loss_txt3d += r.loss.txt3d;
            m.loss_2d3d += r.loss.img3d;
            m.total += r.loss.total;
            m.top1_retrieval += r.top1;
            ++seen;
            return true;
        });
        const double n = static_cast<double>(std::max<std::size_t>(seen, 1));
        m.loss_txt3d /= n;
        m.loss_2d3d /= n;
        m.total /= n;
        m.top1_retrieval /= n;
        spdlog::debug("epoch {} total {:.4f} txt3d {:.4f} 2d3d {:.4f} top1 {:.3f} tau {:.4f}", m.epoch, m.total,
                      m.loss_txt3d, m.loss_2d3d, m.top1_retrieval, std::exp(trainer.model().log_tau));
        metrics.push_back(m);
        if (on_epoch) on_epoch(m);
    }
    if (frozen.checksum() != frozen_before)
        throw Error(ErrorCode::InconsistentConfig, "frozen encoder parameters changed during training");
    return TrainResult{trainer.model(), std::move(metrics)};
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochMetrics>& rows) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << "epoch,loss_txt3d,loss_2d3d,total,top1_retrieval\n";
    out.precision(8);
    for (const auto& r : rows)
        out << r.epoch << ',' << r.loss_txt3d << ',' << r.loss_2d3d << ',' << r.total << ',' << r.top1_retrieval
            << '\n';
}

}  // namespace sceneforge
