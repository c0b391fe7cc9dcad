// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/relations.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sceneforge {

std::string_view phrase(Relation r) {
    switch (r) {
        case Relation::Over: return "over";
        case Relation::Under: return "under";
        case Relation::NextTo: return "next to";
    }
    return "";
}

Relation parse_relation(std::string_view text) {
    if (text == "over") return Relation::Over;
    if (text == "under") return Relation::Under;
    if (text == "next to" || text == "next-to" || text == "next_to") return Relation::NextTo;
    throw Error(ErrorCode::InvalidArgument, "unknown relation '" + std::string(text) + "'");
}

Relation inverse(Relation r) {
    switch (r) {
        case Relation::Over: return Relation::Under;
        case Relation::Under: return Relation::Over;
        case Relation::NextTo: return Relation::NextTo;
    }
    return r;
}

Relation sample_relation(Rng& rng) {
    return kAllRelations[std::uniform_int_distribution<int>(0, 2)(rng)];
}

void PlacementParams::validate() const {
    if (!std::isfinite(delta) || delta < 0.0) throw Error(ErrorCode::Config, "placement.delta must be finite and >= 0");
    if (!std::isfinite(noise_sigma) || noise_sigma < 0.0)
        throw Error(ErrorCode::Config, "placement.noise_sigma must be finite and >= 0");
}

namespace {

std::pair<double, double> projection_range(const PointCloud& cloud, const Vec3& d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : cloud.points) {
        const double t = p.dot(d);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    return {lo, hi};
}

}  // namespace

Displacement displacement_along(const PointCloud& p_new, const PointCloud& p_prev, const Vec3& direction) {
    if (p_new.empty() || p_prev.empty()) throw Error(ErrorCode::InvalidArgument, "displacement of an empty cloud");
    const double prev_max = projection_range(p_prev, direction).second;
    const double new_min = projection_range(p_new, direction).first;
    return {(prev_max - new_min) * direction, direction};
}

Displacement displacement(const PointCloud& p_new, const PointCloud& p_prev, Relation rel, Rng& rng) {
    if (p_new.empty() || p_prev.empty()) throw Error(ErrorCode::InvalidArgument, "displacement of an empty cloud");
    switch (rel) {
        case Relation::Over: {
            const double gap = bounds(p_prev.points).max.z() - bounds(p_new.points).min.z();
            return {Vec3(0.0, 0.0, gap), Vec3::UnitZ()};
        }
        case Relation::Under: {
            const double gap = bounds(p_prev.points).min.z() - bounds(p_new.points).max.z();
            return {Vec3(0.0, 0.0, gap), -Vec3::UnitZ()};
        }
        case Relation::NextTo: {
            const double theta = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
            return displacement_along(p_new, p_prev, Vec3(std::cos(theta), std::sin(theta), 0.0));
        }
    }
    throw Error(ErrorCode::InvalidArgument, "bad relation");
}

Vec3 placement_offset(const PointCloud& p_new, const PointCloud& p_prev, Relation rel, const PlacementParams& params,
                      Rng& rng) {
    const Displacement d = displacement(p_new, p_prev, rel, rng);
    Vec3 offset = d.shift + params.delta * d.direction;
    if (params.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, params.noise_sigma);
        const double ex = noise(rng);
        const double ey = noise(rng);
        const double ez = noise(rng);
        offset += Vec3(ex, ey, ez);
    }
    return offset;
}

PointCloud place(const PointCloud& p_new, const PointCloud& p_prev, Relation rel, const PlacementParams& params,
                 Rng& rng) {
    return translate(p_new, placement_offset(p_new, p_prev, rel, params, rng));
}

}  // namespace sceneforge
