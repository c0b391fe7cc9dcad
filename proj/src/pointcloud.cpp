// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sceneforge {

void PointCloud::validate() const {
    if (points.empty()) throw Error(ErrorCode::InvalidArgument, "point cloud '" + id + "' is empty");
    if (!colors.empty() && colors.size() != points.size())
        throw Error(ErrorCode::SizeMismatch, "point cloud '" + id + "' has " +
                                                 std::to_string(colors.size()) + " colors for " +
                                                 std::to_string(points.size()) + " points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].allFinite())
            throw Error(ErrorCode::NonFiniteCoordinate,
                        "point cloud '" + id + "' has a non-finite coordinate at vertex " + std::to_string(i));
    }
}

namespace {

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

void CaptionedObject::validate() const {
    cloud.validate();
    if (is_blank(caption)) throw Error(ErrorCode::EmptyCaption, "object '" + cloud.id + "' has an empty caption");
}

Bounds bounds(std::span<const Vec3> points) {
    Bounds b{Vec3::Constant(std::numeric_limits<double>::infinity()),
             Vec3::Constant(-std::numeric_limits<double>::infinity())};
    for (const auto& p : points) {
        b.min = b.min.cwiseMin(p);
        b.max = b.max.cwiseMax(p);
    }
    return b;
}

Vec3 centroid(std::span<const Vec3> points) {
    Vec3 sum = Vec3::Zero();
    for (const auto& p : points) sum += p;
    return points.empty() ? sum : Vec3(sum / static_cast<double>(points.size()));
}

PointCloud translate(const PointCloud& cloud, const Vec3& offset) {
    PointCloud out = cloud;
    for (auto& p : out.points) p += offset;
    return out;
}

PointCloud select(const PointCloud& cloud, std::span<const std::size_t> indices) {
    PointCloud out;
    out.id = cloud.id;
    out.points.reserve(indices.size());
    for (auto i : indices) out.points.push_back(cloud.points.at(i));
    if (cloud.has_colors()) {
        out.colors.reserve(indices.size());
        for (auto i : indices) out.colors.push_back(cloud.colors[i]);
    }
    return out;
}

PointCloud concat(const PointCloud& head, const PointCloud& tail) {
    PointCloud out;
    out.id = head.id;
    out.points.reserve(head.size() + tail.size());
    out.points.insert(out.points.end(), head.points.begin(), head.points.end());
    out.points.insert(out.points.end(), tail.points.begin(), tail.points.end());
    if (head.has_colors() && tail.has_colors()) {
        out.colors.reserve(out.points.size());
        out.colors.insert(out.colors.end(), head.colors.begin(), head.colors.end());
        out.colors.insert(out.colors.end(), tail.colors.begin(), tail.colors.end());
    }
    return out;
}

PointCloud normalize_unit_sphere(const PointCloud& cloud) {
    PointCloud out = cloud;
    if (out.points.empty()) return out;
    const Vec3 c = centroid(out.points);
    double max_norm = 0.0;
    for (auto& p : out.points) {
        p -= c;
        max_norm = std::max(max_norm, p.norm());
    }
    if (max_norm < 1e-12) {
        for (auto& p : out.points) p.setZero();
        return out;
    }
    for (auto& p : out.points) p /= max_norm;
    return out;
}

SubsampleMethod parse_subsample_method(const std::string& name) {
    if (name == "uniform") return SubsampleMethod::Uniform;
    if (name == "fps") return SubsampleMethod::Fps;
    throw Error(ErrorCode::Config, "unknown subsample_method '" + name + "' (expected uniform|fps)");
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t target, Rng& rng) {
    if (target == 0) throw Error(ErrorCode::InvalidArgument, "subsample target must be >= 1");
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "cannot subsample an empty cloud");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n >= target) {
        // partial Fisher-Yates: the first `target` slots form the sample
        for (std::size_t i = 0; i < target; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        idx.resize(target);
        return idx;
    }
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    idx.reserve(target);
    while (idx.size() < target) idx.push_back(pick(rng));
    return idx;
}

std::vector<std::size_t> fps_indices(std::span<const Vec3> points, std::size_t target, Rng& rng) {
    if (target == 0) throw Error(ErrorCode::InvalidArgument, "subsample target must be >= 1");
    const std::size_t n = points.size();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "cannot subsample an empty cloud");
    if (n < target) return subsample_indices(n, target, rng);

    std::vector<std::size_t> out;
    out.reserve(target);
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::size_t current = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    for (std::size_t k = 0; k < target; ++k) {
        out.push_back(current);
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist[i] = std::min(dist[i], (points[i] - points[current]).squaredNorm());
            if (dist[i] > best_d) {
                best_d = dist[i];
                best = i;
            }
        }
        current = best;
    }
    return out;
}

PointCloud subsample(const PointCloud& cloud, std::size_t target, Rng& rng, SubsampleMethod method) {
    const auto idx = method == SubsampleMethod::Fps ? fps_indices(cloud.points, target, rng)
                                                     : subsample_indices(cloud.size(), target, rng);
    return select(cloud, idx);
}

}  // namespace sceneforge
