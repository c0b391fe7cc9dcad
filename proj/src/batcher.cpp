// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/batcher.hpp"

#include "sceneforge/augment.hpp"

namespace sceneforge {

void BatchConfig::validate() const {
    if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
    if (max_objects < 1) throw Error(ErrorCode::InvalidArgument, "max_objects must be >= 1");
    if (target_points < 1) throw Error(ErrorCode::InvalidArgument, "target_points must be >= 1");
    if (prefetch_depth < 1) throw Error(ErrorCode::InvalidArgument, "prefetch_depth must be >= 1");
    if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
}

BatchSource make_batch_source(ObjectSet objects, const FrozenImageSurrogate& surrogate) {
    BatchSource src;
    src.surrogates.reserve(objects.size());
    for (const auto& o : objects) src.surrogates.push_back(surrogate.encode(o->cloud));
    src.objects = std::move(objects);
    return src;
}

Sample assemble_sample(std::size_t batch_index, std::size_t sample_index, const BatchConfig& cfg,
                       const BatchSource& source, const SceneForge& forge) {
    const std::size_t d = source.objects.size();
    Rng rng(derive_seed({cfg.global_seed, cfg.epoch, batch_index, sample_index}));
    Sample s;
    s.anchor = std::uniform_int_distribution<std::size_t>(0, d - 1)(rng);
    // with N == 1 there is nothing to compose with
    const bool compose = cfg.max_objects >= 2 && std::bernoulli_distribution(cfg.alpha)(rng);
    if (compose) {
        const std::size_t k = std::uniform_int_distribution<std::size_t>(2, cfg.max_objects)(rng);
        const auto spec = sample_spec(source.objects, s.anchor, k, cfg.target_points, rng);
        ComposedScene scene = forge.forge(spec);
        s.cloud = std::move(scene.cloud);
        s.caption = std::move(scene.refined_caption);
        s.composed = true;
        s.num_objects = k;
    } else {
        const auto& obj = *source.objects[s.anchor];
        s.cloud = subsample(apply(obj.cloud, forge.options().policies.single, rng), cfg.target_points, rng,
                            forge.options().subsample_method);
        s.caption = obj.caption;
        s.surrogate_2d = source.surrogates.at(s.anchor);
    }
    return s;
}

Batch assemble_batch(std::size_t index, const BatchConfig& cfg, const BatchSource& source, const SceneForge& forge) {
    cfg.validate();
    if (source.objects.empty()) throw Error(ErrorCode::EmptyDataset, "no objects to batch");
    if (source.objects.size() < cfg.max_objects)
        throw Error(ErrorCode::DatasetTooSmall, "dataset holds " + std::to_string(source.objects.size()) +
                                                    " objects but max_objects is " + std::to_string(cfg.max_objects));
    if (source.surrogates.size() != source.objects.size())
        throw Error(ErrorCode::SizeMismatch, "surrogate table does not match the object set");
    Batch b;
    b.index = index;
    b.samples.reserve(cfg.batch_size);
    for (std::size_t i = 0; i < cfg.batch_size; ++i) b.samples.push_back(assemble_sample(index, i, cfg, source, forge));
    return b;
}

BigInt count_configurations(std::uint64_t d, std::uint64_t n) {
    if (n > d) throw Error(ErrorCode::InvalidArgument, "N must not exceed D");
    BigInt total = 0, perms = 1, rel = 1;
    for (std::uint64_t k = 1; k <= n; ++k) {
        perms *= (d - k + 1);
        total += perms * rel;
        rel *= 3;
    }
    return total;
}

}  // namespace sceneforge
