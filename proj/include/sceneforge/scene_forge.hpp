// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sceneforge/augment.hpp"
#include "sceneforge/caption_forge.hpp"
#include "sceneforge/pointcloud.hpp"
#include "sceneforge/relations.hpp"

namespace sceneforge {

class CaptionRefiner;

using ObjectRef = std::shared_ptr<const CaptionedObject>;
using ObjectSet = std::vector<ObjectRef>;

ObjectSet make_object_set(std::vector<CaptionedObject> objects);

/// K components chained by K-1 relations: relations[i] places component i+1
/// against component i.
struct CompositionSpec {
    std::vector<ObjectRef> components;
    std::vector<Relation> relations;
    std::size_t target_points = 10000;
    std::uint64_t seed = 0;

    std::size_t k() const { return components.size(); }
    void validate() const;
};

/// The merged cloud before final subsampling and scene-level augmentation.
struct SceneGeometry {
    PointCloud cloud;
    std::vector<std::uint16_t> source;  // component index of every point
    std::vector<Vec3> component_offsets;
};

struct ComposedScene {
    std::string scene_id;
    PointCloud cloud;
    std::vector<std::uint16_t> source;
    RawCaption raw;
    std::string raw_caption;
    std::string refined_caption;
    CompositionSpec spec;
    std::vector<Vec3> component_offsets;

    std::vector<std::string> component_ids() const;
};

struct ForgeOptions {
    PlacementParams placement;
    AugmentPolicies policies;
    SubsampleMethod subsample_method = SubsampleMethod::Uniform;
};

/// Chain placement on PreCompose-augmented components. Consumes `rng` in a
/// fixed order: one augmentation per component, then one placement draw per
/// relation.
SceneGeometry compose_geometry(const CompositionSpec& spec, const PlacementParams& params,
                               const AugmentPolicy& precompose, Rng& rng);

/// Geometry of one composed scene, seeded from spec.seed. The caption fields
/// are left empty. The final-scene dropout runs on the merged cloud ahead of
/// subsampling so that the result always holds exactly target_points points.
ComposedScene compose_scene(const CompositionSpec& spec, const PlacementParams& params,
                            const AugmentPolicies& policies,
                            SubsampleMethod method = SubsampleMethod::Uniform);

/// Anchor becomes component 0; k-1 distinct partners and k-1 relations are
/// drawn uniformly.
CompositionSpec sample_spec(const ObjectSet& objects, std::size_t anchor, std::size_t k, std::size_t target_points,
                            Rng& rng);

/// Geometry plus captions. Without a refiner (or with refinement disabled)
/// the refined caption is the raw one.
class SceneForge {
public:
    SceneForge(ForgeOptions options, std::shared_ptr<CaptionRefiner> refiner, bool refine_captions = true);

    ComposedScene forge(const CompositionSpec& spec) const;

    const ForgeOptions& options() const { return options_; }
    const std::shared_ptr<CaptionRefiner>& refiner() const { return refiner_; }
    bool refines_captions() const { return refine_captions_; }

private:
    ForgeOptions options_;
    std::shared_ptr<CaptionRefiner> refiner_;
    bool refine_captions_;
};

}  // namespace sceneforge
