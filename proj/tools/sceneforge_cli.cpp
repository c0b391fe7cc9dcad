// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "sceneforge/batcher.hpp"
#include "sceneforge/checkpoint.hpp"
#include "sceneforge/compose_baselines.hpp"
#include "sceneforge/config.hpp"
#include "sceneforge/experiments.hpp"
#include "sceneforge/pipeline.hpp"
#include "sceneforge/ply.hpp"
#include "sceneforge/primitives.hpp"
#include "sceneforge/refiner.hpp"
#include "sceneforge/scene_io.hpp"

namespace fs = std::filesystem;
using namespace sceneforge;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::string> log_level;
    std::optional<std::string> dataset;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> points;
};

template <class T>
void set_if(const std::optional<T>& v, T& dst) {
    if (v) dst = *v;
}

AppConfig resolve(const Common& c) {
    AppConfig cfg = c.config_path.empty() ? AppConfig{} : load_config(c.config_path);
    set_if(c.log_level, cfg.log_level);
    set_if(c.dataset, cfg.dataset_root);
    set_if(c.seed, cfg.batch.global_seed);
    set_if(c.points, cfg.batch.target_points);
    cfg.validate();
    spdlog::set_level(spdlog::level::from_str(cfg.log_level));
    return cfg;
}

std::string need_dataset(const AppConfig& cfg) {
    if (cfg.dataset_root.empty()) throw CLI::ValidationError("--dataset", "a dataset root is required");
    return cfg.dataset_root;
}

void add_common(CLI::App* sub, Common& c, bool dataset, bool points) {
    sub->add_option("--config", c.config_path, "TOML-style config file (defaults: `sceneforge print-config`)");
    sub->add_option("--log-level", c.log_level, "trace|debug|info|warn|error|off (default info)");
    sub->add_option("--seed", c.seed, "global seed (default [batch].seed = 0)");
    if (dataset) sub->add_option("--dataset", c.dataset, "dataset root with objects/ and captions.jsonl");
    if (points) sub->add_option("--points", c.points, "points per cloud P (default [batch].target_points)");
}

void write_sample_dir(const fs::path& dir, const Batch& b) {
    fs::create_directories(dir);
    std::ofstream meta(dir / "batch.jsonl");
    for (std::size_t i = 0; i < b.samples.size(); ++i) {
        const auto& s = b.samples[i];
        char name[32];
        std::snprintf(name, sizeof(name), "sample_%04zu.ply", i);
        write_cloud(dir / name, s.cloud);
        nlohmann::json j{{"sample", i},        {"ply", name},
                         {"caption", s.caption}, {"composed", s.composed},
                         {"num_objects", s.num_objects}, {"anchor", s.anchor}};
        if (s.surrogate_2d) j["surrogate_2d"] = std::vector<double>(s.surrogate_2d->data(),
                                                                     s.surrogate_2d->data() + s.surrogate_2d->size());
        meta << j.dump() << '\n';
    }
    if (!meta) throw Error(ErrorCode::Io, "short write in " + dir.string());
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("sceneforge"));
    CLI::App app{"Compose captioned point clouds into multi-object scenes and train toy contrastive models."};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    Common common;
    int rc = 0;

    // gen-primitives
    auto* gen = app.add_subcommand("gen-primitives", "Write a synthetic corpus of captioned primitive shapes");
    std::size_t gen_count = 20, gen_points = 1024;
    std::string gen_out;
    std::uint64_t gen_seed = 0;
    gen->add_option("--count", gen_count, "objects per shape class (5 classes)")->capture_default_str();
    gen->add_option("--points", gen_points, "points per object (>= 64)")->capture_default_str();
    gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--log-level", common.log_level, "log level (default info)");
    gen->callback([&] {
        const auto idx = gen_primitives(gen_count, gen_seed, gen_out, gen_points);
        spdlog::info("wrote {} objects to {}", idx.cardinality(), gen_out);
    });

    // compose
    auto* compose = app.add_subcommand("compose", "Compose scenes with SceneForge or a baseline mixer");
    std::string method = "sceneforge", compose_out;
    std::size_t compose_n = 2, compose_count = 1;
    std::optional<double> lambda;
    add_common(compose, common, true, true);
    compose->add_option("--method", method, "sceneforge|cutmix-r|cutmix-k|mixup")->capture_default_str();
    compose->add_option("--n", compose_n, "objects per scene (baselines mix exactly 2)")->capture_default_str();
    compose->add_option("--count", compose_count, "number of scenes")->capture_default_str();
    compose->add_option("--lambda", lambda, "mixing ratio for baselines (default [baselines].lambda; <0 draws U(0,1))");
    compose->add_option("--out", compose_out, "output directory (scenes/ and scenes.jsonl)")->required();
    compose->callback([&] {
        const auto cfg = resolve(common);
        const auto objects = load_object_set(need_dataset(cfg));
        const auto forge = make_forge(cfg);
        std::vector<SceneRecord> records;
        std::vector<PointCloud> clouds;
        const bool baseline = method != "sceneforge";
        const MixMethod mm = baseline ? parse_mix_method(method) : MixMethod::CutMixR;
        if (baseline && compose_n != 2) throw CLI::ValidationError("--n", "baseline mixers combine exactly 2 objects");
        for (std::size_t i = 0; i < compose_count; ++i) {
            Rng rng(derive_seed({cfg.batch.global_seed, i, 0xc0}));
            const auto anchor = std::uniform_int_distribution<std::size_t>(0, objects.size() - 1)(rng);
            auto spec = sample_spec(objects, anchor, compose_n, cfg.batch.target_points, rng);
            char id[32];
            std::snprintf(id, sizeof(id), "scene_%05zu", i);
            if (!baseline) {
                auto scene = forge.forge(spec);
                scene.scene_id = id;
                scene.cloud.id = id;
                records.push_back(record_of(scene));
                clouds.push_back(std::move(scene.cloud));
                continue;
            }
            MixSpec ms;
            ms.method = mm;
            ms.matching = cfg.mixup_matching;
            ms.seed = spec.seed;
            const double lam = lambda.value_or(cfg.mix_lambda);
            ms.lambda = lam >= 0.0 ? lam : sample_lambda(rng);
            Rng prep(spec.seed);
            const auto& a = *spec.components[0];
            const auto& b = *spec.components[1];
            const auto pa = subsample(normalize_unit_sphere(a.cloud), cfg.batch.target_points, prep);
            const auto pb = subsample(normalize_unit_sphere(b.cloud), cfg.batch.target_points, prep);
            auto mixed = mix(pa, pb, ms);
            const auto raw = baseline_caption(a.caption, b.caption);
            SceneRecord r;
            r.scene_id = id;
            r.components = {a.cloud.id, b.cloud.id};
            r.raw_caption = raw.text;
            r.refined_caption = forge.refiner() ? forge.refiner()->refine(raw).text : rule_refine(raw);
            r.seed = spec.seed;
            r.target_points = cfg.batch.target_points;
            r.method = method;
            r.lambda = ms.lambda;
            records.push_back(r);
            mixed.cloud.id = id;
            clouds.push_back(std::move(mixed.cloud));
        }
        write_scene_dir(compose_out, records, clouds);
        spdlog::info("wrote {} scenes to {}", records.size(), compose_out);
    });

    // batchgen
    auto* batchgen = app.add_subcommand("batchgen", "Assemble training batches through the prefetch pipeline");
    std::optional<double> bg_alpha;
    std::optional<std::size_t> bg_max, bg_bs, bg_prefetch, bg_workers;
    std::size_t bg_batches = 1;
    std::string bg_out;
    add_common(batchgen, common, true, true);
    batchgen->add_option("--alpha", bg_alpha, "composition probability (default [batch].alpha = 0.5)");
    batchgen->add_option("--max-objects", bg_max, "N, max objects per scene (default [batch].max_objects = 3)");
    batchgen->add_option("--batch-size", bg_bs, "samples per batch (default [batch].batch_size)");
    batchgen->add_option("--prefetch", bg_prefetch, "queue depth M (default [batch].prefetch_depth)");
    batchgen->add_option("--workers", bg_workers, "producer threads (default [batch].workers)");
    batchgen->add_option("--batches", bg_batches, "number of batches")->capture_default_str();
    batchgen->add_option("--out", bg_out, "output directory, one batch_NNNNN/ per batch")->required();
    batchgen->callback([&] {
        auto cfg = resolve(common);
        set_if(bg_alpha, cfg.batch.alpha);
        set_if(bg_max, cfg.batch.max_objects);
        set_if(bg_bs, cfg.batch.batch_size);
        set_if(bg_prefetch, cfg.batch.prefetch_depth);
        set_if(bg_workers, cfg.batch.workers);
        cfg.validate();
        const auto objects = load_object_set(need_dataset(cfg));
        const auto forge = make_forge(cfg);
        const FrozenEncoders frozen(cfg.train.dim, cfg.train.frozen_seed);
        const auto source = make_batch_source(objects, frozen.image);
        const auto stats = run_pipeline(cfg.batch, source, forge, bg_batches, [&](Batch&& b) {
            char name[32];
            std::snprintf(name, sizeof(name), "batch_%05zu", b.index);
            write_sample_dir(fs::path(bg_out) / name, b);
            return true;
        });
        spdlog::info("wrote {} batches to {} (max queue occupancy {})", stats.delivered, bg_out, stats.max_occupancy);
    });

    // count-configs
    auto* count = app.add_subcommand("count-configs", "Count distinct scene configurations for D objects and N max");
    std::uint64_t cc_d = 0, cc_n = 0;
    count->add_option("--d", cc_d, "dataset size D")->required();
    count->add_option("--n", cc_n, "max objects N")->required();
    count->callback([&] { std::cout << count_configurations(cc_d, cc_n) << '\n'; });

    // train
    auto* train = app.add_subcommand("train", "Train the toy point encoder against frozen text and 2D encoders");
    std::optional<double> tr_alpha, tr_lr;
    std::optional<std::size_t> tr_max, tr_epochs, tr_bs;
    std::string tr_out;
    add_common(train, common, true, true);
    train->add_option("--alpha", tr_alpha, "composition probability (default [batch].alpha = 0.5)");
    train->add_option("--max-objects", tr_max, "N (default [batch].max_objects = 3)");
    train->add_option("--epochs", tr_epochs, "epochs (default [train].epochs = 30)");
    train->add_option("--lr", tr_lr, "learning rate (default [train].lr)");
    train->add_option("--batch-size", tr_bs, "batch size (default [batch].batch_size)");
    train->add_option("--out", tr_out, "output directory for model.ckpt and metrics.csv")->required();
    train->callback([&] {
        auto cfg = resolve(common);
        set_if(tr_alpha, cfg.batch.alpha);
        set_if(tr_max, cfg.batch.max_objects);
        set_if(tr_epochs, cfg.train.epochs);
        set_if(tr_lr, cfg.train.lr);
        set_if(tr_bs, cfg.batch.batch_size);
        cfg.validate();
        const auto objects = load_object_set(need_dataset(cfg));
        const auto forge = make_forge(cfg);
        fs::create_directories(tr_out);
        const auto result = train_model(cfg, objects, forge, cfg.batch.alpha, cfg.batch.max_objects,
                                        cfg.batch.global_seed, [](const EpochMetrics& m) {
                                            spdlog::info("epoch {:3d} loss {:.4f} top1 {:.3f}", m.epoch, m.total,
                                                         m.top1_retrieval);
                                        });
        save_checkpoint(fs::path(tr_out) / "model.ckpt", result.model);
        write_metrics_csv(fs::path(tr_out) / "metrics.csv", result.metrics);
    });

    // build-nlvis
    auto* nlvis = app.add_subcommand("build-nlvis", "Build an n-object retrieval set, one scene per base object");
    std::size_t nl_n = 3;
    std::string nl_out;
    add_common(nlvis, common, true, false);
    nlvis->add_option("--n", nl_n, "objects per scene, 1..10")->capture_default_str();
    nlvis->add_option("--out", nl_out, "output directory")->required();
    nlvis->callback([&] {
        auto cfg = resolve(common);
        if (common.seed) cfg.eval_seed = *common.seed;
        const auto objects = load_object_set(need_dataset(cfg));
        const auto forge = make_forge(cfg);
        const auto ds = build_ncomposed(objects, nl_n, forge, cfg.eval_seed, cfg.eval_target_points);
        std::vector<SceneRecord> records;
        std::vector<PointCloud> clouds;
        for (const auto& s : ds.scenes) {
            SceneRecord r;
            r.scene_id = s.id;
            r.components = s.component_ids;
            r.raw_caption = s.caption;
            r.refined_caption = s.caption;
            r.seed = cfg.eval_seed;
            r.target_points = cfg.eval_target_points;
            r.method = nl_n == 1 ? "single" : "nlvis";
            records.push_back(r);
            clouds.push_back(s.cloud);
        }
        write_scene_dir(nl_out, records, clouds);
        spdlog::info("wrote {} scenes with n = {} to {}", records.size(), nl_n, nl_out);
    });

    // eval-retrieval
    auto* evalr = app.add_subcommand("eval-retrieval", "Top-1/top-5 cross-modal retrieval on a scene directory");
    std::string ev_scenes, ev_model, ev_csv;
    evalr->add_option("--scenes", ev_scenes, "scene directory (scenes.jsonl + scenes/)")->required();
    evalr->add_option("--model", ev_model, "checkpoint from `train`")->required();
    evalr->add_option("--csv", ev_csv, "append-free CSV output (stdout when omitted)");
    evalr->add_option("--config", common.config_path, "config file");
    evalr->callback([&] {
        const auto cfg = resolve(common);
        const auto model = load_checkpoint(ev_model);
        const FrozenEncoders frozen(model.encoder.dim(), model.frozen_seed);
        const auto ds = read_scene_dir(ev_scenes);
        const auto r = eval_retrieval(cloud_encoder(model), text_encoder(frozen), ds);
        const std::vector<SweepRow> rows{{ds.n, r}};
        if (ev_csv.empty()) {
            std::printf("n,top1_t2p,top5_t2p,top1_p2t,top5_p2t,averaged_top1\n%zu,%.6f,%.6f,%.6f,%.6f,%.6f\n", ds.n,
                        r.top1_t2p, r.top5_t2p, r.top1_p2t, r.top5_p2t, r.averaged_top1);
        } else {
            write_sweep_csv(ev_csv, rows);
        }
        (void)cfg;
    });

    // reposition
    auto* repo = app.add_subcommand("reposition", "Move the second object of a two-object scene to match a relation");
    std::string rp_scenes, rp_id, rp_relation, rp_out, rp_model;
    std::optional<std::size_t> rp_steps;
    std::optional<double> rp_step;
    std::optional<std::string> rp_method;
    add_common(repo, common, true, false);
    repo->add_option("--scenes", rp_scenes, "scene directory written by `compose`")->required();
    repo->add_option("--scene", rp_id, "scene id")->required();
    repo->add_option("--relation", rp_relation, "over|under|next-to")->required();
    repo->add_option("--model", rp_model, "checkpoint; omitted: geometric oracle scorer");
    repo->add_option("--out-ply", rp_out, "writes <stem>_before.ply and <stem>_after.ply")->required();
    repo->add_option("--steps", rp_steps, "search steps (default [reposition].steps)");
    repo->add_option("--step-size", rp_step, "initial step (default [reposition].step_size)");
    repo->add_option("--method", rp_method, "coordinate|gradient (default [reposition].method)");
    repo->callback([&] {
        auto cfg = resolve(common);
        set_if(rp_steps, cfg.reposition.steps);
        set_if(rp_step, cfg.reposition.step_size);
        if (rp_method) cfg.reposition.method = parse_reposition_method(*rp_method);
        const Relation target = parse_relation(rp_relation == "next-to" ? "next to" : rp_relation);
        const auto records = read_scene_records(fs::path(rp_scenes) / "scenes.jsonl");
        const SceneRecord* rec = nullptr;
        for (const auto& r : records) {
            if (r.scene_id == rp_id) rec = &r;
        }
        if (!rec) throw Error(ErrorCode::InvalidArgument, "no scene '" + rp_id + "' in " + rp_scenes);
        const auto objects = load_object_set(need_dataset(cfg));
        const auto spec = spec_from_record(*rec, objects);
        if (spec.k() != 2) throw Error(ErrorCode::InvalidSpec, "repositioning needs a two-object scene");
        const auto scene = make_forge(cfg, true).forge(spec);
        if (scene.raw_caption != rec->raw_caption)
            spdlog::warn("recomposed caption differs from the record; is the dataset the same?");

        std::optional<ToyModel> model;
        SceneScorer scorer;
        std::string caption;
        {
            const std::string caps[] = {spec.components[0]->caption, spec.components[1]->caption};
            const Relation rel[] = {target};
            caption = rule_refine(compose_raw(caps, rel));
        }
        std::optional<FrozenEncoders> frozen;
        if (!rp_model.empty()) {
            model = load_checkpoint(rp_model);
            frozen.emplace(model->encoder.dim(), model->frozen_seed);
            scorer = encoder_scorer(model->encoder, frozen->text.encode(caption));
        } else {
            scorer = planted_scorer(target, cfg.predicate);
        }
        const auto res = reposition(scene.cloud, scene.source, scorer, cfg.reposition);
        const auto moved = offset_component(scene.cloud, scene.source, 1, res.offset);
        const fs::path out(rp_out);
        const fs::path stem = out.parent_path() / out.stem();
        write_cloud(stem.string() + "_before.ply", scene.cloud);
        write_cloud(stem.string() + "_after.ply", moved);
        nlohmann::json j{{"scene_id", rp_id},
                         {"caption", caption},
                         {"offset", {res.offset.x(), res.offset.y(), res.offset.z()}},
                         {"initial_score", res.trajectory.front()},
                         {"final_score", res.trajectory.back()},
                         {"steps", res.trajectory.size() - 1},
                         {"predicate_satisfied", relation_predicate(moved, scene.source, target, cfg.predicate)}};
        std::cout << j.dump() << '\n';
    });

    // sweep-alpha
    auto* sa = app.add_subcommand("sweep-alpha", "Train one model per alpha and evaluate on n = 1 and n = 3");
    std::vector<double> sa_alphas{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<std::uint64_t> sa_seeds{0};
    std::optional<std::size_t> sa_epochs;
    std::string sa_csv;
    add_common(sa, common, true, true);
    sa->add_option("--alphas", sa_alphas, "alpha values")->capture_default_str();
    sa->add_option("--seeds", sa_seeds, "training seeds")->capture_default_str();
    sa->add_option("--epochs", sa_epochs, "epochs per run (default [train].epochs)");
    sa->add_option("--csv", sa_csv, "output CSV")->required();
    sa->callback([&] {
        auto cfg = resolve(common);
        set_if(sa_epochs, cfg.train.epochs);
        const auto objects = load_object_set(need_dataset(cfg));
        const auto rows = sweep_alpha(cfg, objects, sa_alphas, sa_seeds);
        write_alpha_csv(sa_csv, rows);
    });

    // sweep-n
    auto* sn = app.add_subcommand("sweep-n", "Retrieval accuracy as the number of objects per scene grows");
    std::string sn_model, sn_csv;
    std::size_t sn_max = 10;
    add_common(sn, common, true, false);
    sn->add_option("--model", sn_model, "checkpoint from `train`")->required();
    sn->add_option("--n-max", sn_max, "evaluate n = 1..n-max (<= 10)")->capture_default_str();
    sn->add_option("--csv", sn_csv, "output CSV")->required();
    sn->callback([&] {
        auto cfg = resolve(common);
        if (common.seed) cfg.eval_seed = *common.seed;
        if (sn_max < 1 || sn_max > 10) throw CLI::ValidationError("--n-max", "must lie in 1..10");
        const auto objects = load_object_set(need_dataset(cfg));
        const auto forge = make_forge(cfg);
        const auto model = load_checkpoint(sn_model);
        const FrozenEncoders frozen(model.encoder.dim(), model.frozen_seed);
        std::vector<std::size_t> ns;
        for (std::size_t n = 1; n <= sn_max; ++n) ns.push_back(n);
        write_sweep_csv(sn_csv, sweep_n(cloud_encoder(model), text_encoder(frozen), objects, forge, ns,
                                        cfg.eval_seed, cfg.eval_target_points));
    });

    auto* pc = app.add_subcommand("print-config", "Print the default configuration file");
    pc->callback([] { std::cout << default_config_text(); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const Error& e) {
        spdlog::error("{} ({})", e.what(), to_string(e.code()));
        rc = 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        rc = 2;
    }
    return rc;
}
