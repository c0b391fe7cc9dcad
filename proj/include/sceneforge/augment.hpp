// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sceneforge/pointcloud.hpp"

namespace sceneforge {

/// Which context an augmentation runs in. Objects headed for a composed scene
/// keep their vertical axis nearly upright and are never shifted, so that
/// "over" and "under" stay meaningful; the finished scene may be shifted.
enum class AugmentMode { Single, PreCompose, FinalScene };

struct AugmentPolicy {
    AugmentMode mode = AugmentMode::Single;
    double dropout_rate = 0.0;  // in [0, 1)
    double scale_low = 1.0;
    double scale_high = 1.0;
    double yaw_range = 0.0;    // radians, about +z
    double tilt_range = 0.0;   // radians, about x and y
    double shift_range = 0.0;  // half-width of the translation cube

    void validate() const;
};

AugmentPolicy default_policy(AugmentMode mode);

/// An all-zero policy: apply() reduces to normalize_unit_sphere.
AugmentPolicy identity_policy(AugmentMode mode);

struct AugmentPolicies {
    AugmentPolicy single = default_policy(AugmentMode::Single);
    AugmentPolicy precompose = default_policy(AugmentMode::PreCompose);
    AugmentPolicy final_scene = default_policy(AugmentMode::FinalScene);
};

/// Keeps each point with probability 1 - rate; at least one point survives.
PointCloud dropout(const PointCloud& cloud, double rate, Rng& rng);

/// normalize -> dropout -> scale -> rotate (tilt about x, y then yaw about z) -> translate.
PointCloud apply(const PointCloud& cloud, const AugmentPolicy& policy, Rng& rng);

/// The stages after dropout, on an already-normalized cloud.
PointCloud apply_rigid(const PointCloud& cloud, const AugmentPolicy& policy, Rng& rng);

}  // namespace sceneforge
