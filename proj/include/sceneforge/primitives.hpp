// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sceneforge/dataset.hpp"
#include "sceneforge/pointcloud.hpp"

namespace sceneforge {

enum class Shape { Sphere, Box, Cylinder, Cone, Torus };
inline constexpr Shape kAllShapes[] = {Shape::Sphere, Shape::Box, Shape::Cylinder, Shape::Cone, Shape::Torus};
const char* to_string(Shape s);

// Captions only mention what survives unit-sphere normalization (shape and
// proportions); colour is written to the PLY but never described.
struct PrimitiveSpec {
    Shape shape = Shape::Sphere;
    double size = 0.5;           // radius or half-extent before proportions
    double height_ratio = 1.0;   // z stretch; < 1 flat, > 1 tall
    double length_ratio = 1.0;   // x stretch
    bool variant = false;        // dome / open box / tube / truncated cone
    bool flipped = false;        // upside-down cone, standing torus
    double tube_ratio = 0.25;    // torus minor / major radius
    Vec3 color = Vec3(0.5, 0.5, 0.5);
    std::size_t point_count = 1024;
    double surface_noise = 0.005;  // uniform displacement along the normal, +-
    std::string caption;

    void validate() const;
};

PrimitiveSpec random_primitive(Shape shape, Rng& rng, std::size_t point_count = 1024);
std::string describe(const PrimitiveSpec& spec);

PointCloud sample_primitive(const PrimitiveSpec& spec, Rng& rng);

/// count objects per shape, interleaved by shape, ids "prim_00000"...
std::vector<CaptionedObject> make_primitives(std::size_t count_per_class, std::uint64_t seed,
                                             std::size_t point_count = 1024);

DatasetIndex gen_primitives(std::size_t count_per_class, std::uint64_t seed, const std::filesystem::path& out_dir,
                            std::size_t point_count = 1024);

}  // namespace sceneforge
