// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/experiments.hpp"

#include <fstream>

#include "sceneforge/dataset.hpp"
#include "sceneforge/refiner.hpp"

namespace sceneforge {

ObjectSet load_object_set(const std::filesystem::path& root) { return make_object_set(load_objects(load_dataset(root))); }

SceneForge make_forge(const AppConfig& cfg, bool geometry_only) {
    ForgeOptions opt;
    opt.placement = cfg.placement;
    opt.policies = cfg.augment;
    opt.subsample_method = cfg.subsample_method;
    std::shared_ptr<CaptionRefiner> refiner;
    if (!geometry_only) refiner = std::make_shared<CaptionRefiner>(cfg.refiner);
    return SceneForge(opt, refiner, !geometry_only);
}

TrainResult train_model(const AppConfig& cfg, const ObjectSet& objects, const SceneForge& forge, double alpha,
                        std::size_t max_objects, std::uint64_t seed,
                        const std::function<void(const EpochMetrics&)>& on_epoch) {
    BatchConfig batch = cfg.batch;
    batch.alpha = alpha;
    batch.max_objects = max_objects;
    batch.global_seed = seed;
    TrainConfig train = cfg.train;
    train.init_seed = derive_seed({seed, 0x1417});
    const FrozenEncoders frozen(train.dim, train.frozen_seed);
    return train_toy(train, batch, objects, forge, frozen, on_epoch);
}

CloudEncoderFn cloud_encoder(const ToyModel& model) {
    return [&model](const PointCloud& c) { return model.encoder.encode(c); };
}

TextEncoderFn text_encoder(const FrozenEncoders& frozen) {
    return [&frozen](const std::string& t) { return frozen.text.encode(t); };
}

std::vector<AlphaSweepRow> sweep_alpha(const AppConfig& cfg, const ObjectSet& objects, std::span<const double> alphas,
                                       std::span<const std::uint64_t> seeds) {
    const SceneForge forge = make_forge(cfg);
    const FrozenEncoders frozen(cfg.train.dim, cfg.train.frozen_seed);
    const std::size_t ns[] = {1, 3};
    std::vector<AlphaSweepRow> rows;
    for (auto seed : seeds) {
        for (double alpha : alphas) {
            const auto trained = train_model(cfg, objects, forge, alpha, cfg.batch.max_objects, seed);
            const auto sweep = sweep_n(cloud_encoder(trained.model), text_encoder(frozen), objects, forge, ns,
                                       cfg.eval_seed, cfg.eval_target_points);
            AlphaSweepRow r{alpha, seed, sweep[0].report.averaged_top1, sweep[1].report.averaged_top1, 0.0};
            r.mixed = 0.5 * (r.top1_n1 + r.top1_n3);
            rows.push_back(r);
        }
    }
    return rows;
}

void write_alpha_csv(const std::filesystem::path& path, const std::vector<AlphaSweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << "alpha,seed,top1_n1,top1_n3,mixed_top1\n";
    out.precision(6);
    for (const auto& r : rows)
        out << r.alpha << ',' << r.seed << ',' << r.top1_n1 << ',' << r.top1_n3 << ',' << r.mixed << '\n';
}

std::vector<RepositionTrial> make_reposition_trials(const ObjectSet& objects, const SceneForge& forge,
                                                    std::size_t count, std::size_t target_points, std::uint64_t seed) {
    std::vector<RepositionTrial> out;
    for (std::size_t t = 0; t < count; ++t) {
        Rng rng(derive_seed({seed, t, 0x9e90}));
        const auto anchor = std::uniform_int_distribution<std::size_t>(0, objects.size() - 1)(rng);
        auto spec = sample_spec(objects, anchor, 2, target_points, rng);
        RepositionTrial trial;
        trial.target = spec.relations[0];
        // compose with a different relation so the target has to be reached by moving
        spec.relations[0] = kAllRelations[(static_cast<int>(trial.target) + 1 +
                                           std::uniform_int_distribution<int>(0, 1)(rng)) % 3];
        trial.scene = forge.forge(spec);
        const std::string captions[] = {spec.components[0]->caption, spec.components[1]->caption};
        const Relation rel[] = {trial.target};
        trial.target_caption = rule_refine(compose_raw(captions, rel));
        out.push_back(std::move(trial));
    }
    return out;
}

}  // namespace sceneforge
