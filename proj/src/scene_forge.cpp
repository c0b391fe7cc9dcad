// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/scene_forge.hpp"

#include <cstdio>
#include <numeric>

#include "sceneforge/refiner.hpp"

namespace sceneforge {

ObjectSet make_object_set(std::vector<CaptionedObject> objects) {
    ObjectSet out;
    out.reserve(objects.size());
    for (auto& o : objects) out.push_back(std::make_shared<const CaptionedObject>(std::move(o)));
    return out;
}

void CompositionSpec::validate() const {
    if (components.size() < 2) throw Error(ErrorCode::InvalidSpec, "a composition needs K >= 2 components");
    if (relations.size() + 1 != components.size())
        throw Error(ErrorCode::InvalidSpec, "a composition of K components needs K-1 relations");
    if (target_points == 0) throw Error(ErrorCode::InvalidSpec, "target_points must be >= 1");
    if (components.size() > 65535) throw Error(ErrorCode::InvalidSpec, "too many components");
    for (const auto& c : components) {
        if (!c) throw Error(ErrorCode::InvalidSpec, "null component");
        c->validate();
    }
}

std::vector<std::string> ComposedScene::component_ids() const {
    std::vector<std::string> ids;
    for (const auto& c : spec.components) ids.push_back(c->cloud.id);
    return ids;
}

SceneGeometry compose_geometry(const CompositionSpec& spec, const PlacementParams& params,
                               const AugmentPolicy& precompose, Rng& rng) {
    spec.validate();
    params.validate();
    SceneGeometry g;
    PointCloud prev = apply(spec.components[0]->cloud, precompose, rng);
    g.cloud = prev;
    g.source.assign(prev.size(), 0);
    g.component_offsets.push_back(Vec3::Zero());
    for (std::size_t i = 1; i < spec.k(); ++i) {
        PointCloud cur = apply(spec.components[i]->cloud, precompose, rng);
        const Vec3 offset = placement_offset(cur, prev, spec.relations[i - 1], params, rng);
        cur = translate(cur, offset);
        g.cloud = concat(g.cloud, cur);
        g.source.insert(g.source.end(), cur.size(), static_cast<std::uint16_t>(i));
        g.component_offsets.push_back(offset);
        prev = std::move(cur);
    }
    g.cloud.id.clear();
    return g;
}

ComposedScene compose_scene(const CompositionSpec& spec, const PlacementParams& params,
                            const AugmentPolicies& policies, SubsampleMethod method) {
    Rng rng(spec.seed);
    SceneGeometry g = compose_geometry(spec, params, policies.precompose, rng);

    // scene-level dropout, expressed as a row subset so source tags follow
    std::vector<std::size_t> rows;
    if (policies.final_scene.dropout_rate > 0.0) {
        std::bernoulli_distribution keep(1.0 - policies.final_scene.dropout_rate);
        for (std::size_t i = 0; i < g.cloud.size(); ++i) {
            if (keep(rng)) rows.push_back(i);
        }
        if (rows.empty()) rows.push_back(0);
    } else {
        rows.resize(g.cloud.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    PointCloud kept = select(g.cloud, rows);
    const auto picked = method == SubsampleMethod::Fps ? fps_indices(kept.points, spec.target_points, rng)
                                                       : subsample_indices(kept.size(), spec.target_points, rng);

    ComposedScene scene;
    scene.cloud = normalize_unit_sphere(select(kept, picked));
    scene.cloud = apply_rigid(scene.cloud, policies.final_scene, rng);
    scene.source.reserve(picked.size());
    for (auto p : picked) scene.source.push_back(g.source[rows[p]]);
    scene.spec = spec;
    scene.component_offsets = std::move(g.component_offsets);
    char id[32];
    std::snprintf(id, sizeof(id), "scene_%016llx", static_cast<unsigned long long>(spec.seed));
    scene.scene_id = id;
    scene.cloud.id = scene.scene_id;
    return scene;
}

CompositionSpec sample_spec(const ObjectSet& objects, std::size_t anchor, std::size_t k, std::size_t target_points,
                            Rng& rng) {
    const std::size_t d = objects.size();
    if (k < 2) throw Error(ErrorCode::InvalidSpec, "sample_spec needs k >= 2");
    if (k > d)
        throw Error(ErrorCode::DatasetTooSmall,
                    "cannot draw " + std::to_string(k) + " distinct objects from a dataset of " + std::to_string(d));
    if (anchor >= d) throw Error(ErrorCode::InvalidArgument, "anchor index out of range");

    // partial Fisher-Yates over every index except the anchor
    std::vector<std::size_t> pool;
    pool.reserve(d - 1);
    for (std::size_t i = 0; i < d; ++i) {
        if (i != anchor) pool.push_back(i);
    }
    CompositionSpec spec;
    spec.components.push_back(objects[anchor]);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
        spec.components.push_back(objects[pool[i]]);
    }
    for (std::size_t i = 0; i + 1 < k; ++i) spec.relations.push_back(sample_relation(rng));
    spec.target_points = target_points;
    spec.seed = rng();
    return spec;
}

SceneForge::SceneForge(ForgeOptions options, std::shared_ptr<CaptionRefiner> refiner, bool refine_captions)
    : options_(std::move(options)), refiner_(std::move(refiner)), refine_captions_(refine_captions) {
    options_.placement.validate();
    options_.policies.single.validate();
    options_.policies.precompose.validate();
    options_.policies.final_scene.validate();
}

ComposedScene SceneForge::forge(const CompositionSpec& spec) const {
    ComposedScene scene = compose_scene(spec, options_.placement, options_.policies, options_.subsample_method);
    std::vector<std::string> captions;
    for (const auto& c : spec.components) captions.push_back(c->caption);
    scene.raw = compose_raw(captions, spec.relations);
    scene.raw_caption = scene.raw.text;
    if (!refine_captions_) scene.refined_caption = scene.raw_caption;
    else if (refiner_) scene.refined_caption = refiner_->refine(scene.raw).text;
    else scene.refined_caption = rule_refine(scene.raw);
    return scene;
}

}  // namespace sceneforge
