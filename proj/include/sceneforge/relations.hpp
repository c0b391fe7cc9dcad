// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "sceneforge/pointcloud.hpp"

namespace sceneforge {

// Horizontal directions such as "left of" are intentionally absent: source
// objects carry no consistent horizontal orientation, only a vertical one.
enum class Relation { Over, Under, NextTo };

inline constexpr Relation kAllRelations[] = {Relation::Over, Relation::Under, Relation::NextTo};

std::string_view phrase(Relation r);
/// Accepts "over", "under", "next to", "next-to" and "next_to".
Relation parse_relation(std::string_view text);
Relation inverse(Relation r);

Relation sample_relation(Rng& rng);

struct PlacementParams {
    double delta = 0.05;        // fixed gap along the shift direction
    double noise_sigma = 0.01;  // stddev of isotropic Gaussian jitter

    void validate() const;
};

struct Displacement {
    Vec3 shift;
    Vec3 direction;  // unit axis along which delta is added
};

/// Shift that brings `p_new` flush against `p_prev`: on top for Over, below for
/// Under, and beside along a random horizontal unit vector for NextTo.
Displacement displacement(const PointCloud& p_new, const PointCloud& p_prev, Relation rel, Rng& rng);

/// NextTo displacement along a caller-chosen horizontal direction.
Displacement displacement_along(const PointCloud& p_new, const PointCloud& p_prev, const Vec3& direction);

/// Full rigid translation: shift + delta * direction + noise.
Vec3 placement_offset(const PointCloud& p_new, const PointCloud& p_prev, Relation rel,
                      const PlacementParams& params, Rng& rng);

PointCloud place(const PointCloud& p_new, const PointCloud& p_prev, Relation rel, const PlacementParams& params,
                 Rng& rng);

}  // namespace sceneforge
