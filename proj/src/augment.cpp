// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/augment.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace sceneforge {

void AugmentPolicy::validate() const {
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw Error(ErrorCode::Config, "dropout_rate must lie in [0, 1)");
    if (!(scale_low > 0.0 && scale_low <= scale_high))
        throw Error(ErrorCode::Config, "scale range must satisfy 0 < low <= high");
    if (yaw_range < 0.0 || tilt_range < 0.0 || shift_range < 0.0)
        throw Error(ErrorCode::Config, "augmentation ranges must be non-negative");
}

AugmentPolicy default_policy(AugmentMode mode) {
    constexpr double pi = std::numbers::pi;
    AugmentPolicy p;
    p.mode = mode;
    p.dropout_rate = 0.1;
    p.scale_low = 0.9;
    p.scale_high = 1.1;
    p.yaw_range = pi;
    switch (mode) {
        case AugmentMode::Single:
            p.tilt_range = pi / 6.0;
            p.shift_range = 0.2;
            break;
        case AugmentMode::PreCompose:
            p.tilt_range = pi / 36.0;
            p.shift_range = 0.0;
            break;
        case AugmentMode::FinalScene:
            p.tilt_range = pi / 36.0;
            p.shift_range = 0.2;
            break;
    }
    return p;
}

AugmentPolicy identity_policy(AugmentMode mode) {
    AugmentPolicy p;
    p.mode = mode;
    return p;
}

PointCloud dropout(const PointCloud& cloud, double rate, Rng& rng) {
    if (rate <= 0.0 || cloud.empty()) return cloud;
    std::bernoulli_distribution keep(1.0 - rate);
    std::vector<std::size_t> kept;
    kept.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (keep(rng)) kept.push_back(i);
    }
    if (kept.empty()) kept.push_back(std::uniform_int_distribution<std::size_t>(0, cloud.size() - 1)(rng));
    return select(cloud, kept);
}

namespace {

double uniform_sym(double half_width, Rng& rng) {
    return std::uniform_real_distribution<double>(-half_width, half_width)(rng);
}

}  // namespace

PointCloud apply_rigid(const PointCloud& cloud, const AugmentPolicy& policy, Rng& rng) {
    const double s = std::uniform_real_distribution<double>(policy.scale_low, policy.scale_high)(rng);
    const double yaw = uniform_sym(policy.yaw_range, rng);
    const double tilt_x = uniform_sym(policy.tilt_range, rng);
    const double tilt_y = uniform_sym(policy.tilt_range, rng);
    const Vec3 shift(uniform_sym(policy.shift_range, rng), uniform_sym(policy.shift_range, rng),
                     uniform_sym(policy.shift_range, rng));

    const Eigen::Matrix3d rot = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(tilt_y, Vec3::UnitY()) *
                                 Eigen::AngleAxisd(tilt_x, Vec3::UnitX()))
                                    .toRotationMatrix();
    PointCloud out = cloud;
    for (auto& p : out.points) p = rot * (s * p) + shift;
    return out;
}

PointCloud apply(const PointCloud& cloud, const AugmentPolicy& policy, Rng& rng) {
    cloud.validate();
    PointCloud out = normalize_unit_sphere(cloud);
    out = dropout(out, policy.dropout_rate, rng);
    return apply_rigid(out, policy, rng);
}

}  // namespace sceneforge
