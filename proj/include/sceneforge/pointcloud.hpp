// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sceneforge/common.hpp"

namespace sceneforge {

/// A flat point set in model space. Colors are optional (empty vector means
/// absent) and, when present, are parallel to `points` with channels in [0,1].
struct PointCloud {
    std::string id;
    std::vector<Vec3> points;
    std::vector<Vec3> colors;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_colors() const { return !colors.empty(); }

    /// Throws Error on an empty cloud, a color/point length mismatch or a
    /// non-finite coordinate.
    void validate() const;
};

struct CaptionedObject {
    PointCloud cloud;
    std::string caption;

    void validate() const;
};

struct Bounds {
    Vec3 min;
    Vec3 max;
};

Bounds bounds(std::span<const Vec3> points);
Vec3 centroid(std::span<const Vec3> points);

PointCloud translate(const PointCloud& cloud, const Vec3& offset);

/// Picks the given rows (colors follow their points).
PointCloud select(const PointCloud& cloud, std::span<const std::size_t> indices);

/// Concatenates `tail` onto `head`. Colors survive only if both carry them.
PointCloud concat(const PointCloud& head, const PointCloud& tail);

/// Centers on the centroid and divides by the largest point norm. A cloud whose
/// points all coincide maps to all-zero coordinates.
PointCloud normalize_unit_sphere(const PointCloud& cloud);

enum class SubsampleMethod { Uniform, Fps };

SubsampleMethod parse_subsample_method(const std::string& name);

/// Row indices realising `subsample`: a uniform draw without replacement when
/// n >= target, otherwise every row once followed by uniform repeats.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t target, Rng& rng);

/// Farthest point sampling from a random seed row; repeats rows as above when
/// the cloud is smaller than the target.
std::vector<std::size_t> fps_indices(std::span<const Vec3> points, std::size_t target, Rng& rng);

PointCloud subsample(const PointCloud& cloud, std::size_t target, Rng& rng,
                     SubsampleMethod method = SubsampleMethod::Uniform);

}  // namespace sceneforge
