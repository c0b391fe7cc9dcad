// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/primitives.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Geometry>

namespace sceneforge {

namespace {

constexpr double kPi = std::numbers::pi;

const Vec3 kPalette[] = {
    {0.85, 0.15, 0.15}, {0.15, 0.65, 0.2}, {0.2, 0.3, 0.85}, {0.95, 0.8, 0.1},  {0.6, 0.3, 0.75},
    {0.95, 0.5, 0.1},   {0.1, 0.7, 0.75},  {0.55, 0.35, 0.2}, {0.9, 0.9, 0.9}, {0.15, 0.15, 0.15},
};

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

struct Surface {
    Vec3 p;
    Vec3 n;  // outward normal, unit
};

Surface on_ellipsoid(const Vec3& radii, bool dome, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec3 u(g(rng), g(rng), g(rng));
    while (u.norm() < 1e-12) u = Vec3(g(rng), g(rng), g(rng));
    u.normalize();
    if (dome) u.z() = std::abs(u.z());
    const Vec3 p = u.cwiseProduct(radii);
    const Vec3 n = p.cwiseQuotient(radii.cwiseProduct(radii)).normalized();
    return {p, n};
}

Surface on_box(const Vec3& half, bool open_top, Rng& rng) {
    const double ax = 4 * half.y() * half.z(), ay = 4 * half.x() * half.z(), az = 4 * half.x() * half.y();
    const double areas[6] = {ax, ax, ay, ay, open_top ? 0.0 : az, az};
    std::discrete_distribution<int> face(std::begin(areas), std::end(areas));
    const int f = face(rng);
    const int axis = f / 2;
    const double sign = f % 2 == 0 ? 1.0 : -1.0;
    // faces come in (+,-) pairs per axis; the open face is +z
    Vec3 p(uniform(rng, -half.x(), half.x()), uniform(rng, -half.y(), half.y()), uniform(rng, -half.z(), half.z()));
    p[axis] = sign * half[axis];
    Vec3 n = Vec3::Zero();
    n[axis] = sign;
    return {p, n};
}

Surface on_cylinder(double r, double half_h, double stretch_x, bool hollow, Rng& rng) {
    const double side = 2 * kPi * r * 2 * half_h;
    const double cap = hollow ? 0.0 : kPi * r * r;
    std::discrete_distribution<int> part({side, cap, cap});
    const int which = part(rng);
    const double t = uniform(rng, 0.0, 2 * kPi);
    Vec3 p, n;
    if (which == 0) {
        p = Vec3(r * std::cos(t), r * std::sin(t), uniform(rng, -half_h, half_h));
        n = Vec3(std::cos(t), std::sin(t), 0.0);
    } else {
        const double rr = r * std::sqrt(uniform(rng, 0.0, 1.0));
        const double z = which == 1 ? half_h : -half_h;
        p = Vec3(rr * std::cos(t), rr * std::sin(t), z);
        n = Vec3(0, 0, which == 1 ? 1.0 : -1.0);
    }
    p.x() *= stretch_x;
    n.x() /= stretch_x;
    return {p, n.normalized()};
}

Surface on_cone(double r, double h, bool truncated, Rng& rng) {
    const double r_top = truncated ? 0.4 * r : 0.0;
    const double slant = std::hypot(r - r_top, h);
    const double lateral = kPi * (r + r_top) * slant;
    std::discrete_distribution<int> part({lateral, kPi * r * r, kPi * r_top * r_top});
    const int which = part(rng);
    const double t = uniform(rng, 0.0, 2 * kPi);
    if (which == 0) {
        // radius grows linearly from top to base; area density is proportional to it
        const double u = uniform(rng, 0.0, 1.0);
        const double rad = std::sqrt(r_top * r_top + u * (r * r - r_top * r_top));
        const double z = h * (r - rad) / (r - r_top);
        const Vec3 p(rad * std::cos(t), rad * std::sin(t), z - h / 2);
        const Vec3 n = Vec3(h * std::cos(t), h * std::sin(t), r - r_top).normalized();
        return {p, n};
    }
    const double cap_r = which == 1 ? r : r_top;
    const double rr = cap_r * std::sqrt(uniform(rng, 0.0, 1.0));
    const double z = which == 1 ? -h / 2 : h / 2;
    return {Vec3(rr * std::cos(t), rr * std::sin(t), z), Vec3(0, 0, which == 1 ? -1.0 : 1.0)};
}

Surface on_torus(double big_r, double small_r, double stretch_x, Rng& rng) {
    const double u = uniform(rng, 0.0, 2 * kPi);
    // rejection on the tube angle so the outer side gets its larger share of area
    double v;
    do {
        v = uniform(rng, 0.0, 2 * kPi);
    } while (uniform(rng, 0.0, big_r + small_r) > big_r + small_r * std::cos(v));
    const Vec3 n0(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v));
    Vec3 p((big_r + small_r * std::cos(v)) * std::cos(u), (big_r + small_r * std::cos(v)) * std::sin(u),
           small_r * std::sin(v));
    Vec3 n = n0;
    p.x() *= stretch_x;
    n.x() /= stretch_x;
    return {p, n.normalized()};
}

}  // namespace

const char* to_string(Shape s) {
    switch (s) {
        case Shape::Sphere: return "sphere";
        case Shape::Box: return "box";
        case Shape::Cylinder: return "cylinder";
        case Shape::Cone: return "cone";
        case Shape::Torus: return "torus";
    }
    return "?";
}

void PrimitiveSpec::validate() const {
    if (point_count < 64) throw Error(ErrorCode::InvalidArgument, "primitives need at least 64 points");
    if (!(size > 0.0) || !(height_ratio > 0.0) || !(length_ratio > 0.0) || !(tube_ratio > 0.0 && tube_ratio < 1.0))
        throw Error(ErrorCode::InvalidArgument, "primitive proportions must be positive");
    if (!(surface_noise >= 0.0)) throw Error(ErrorCode::InvalidArgument, "surface noise must be >= 0");
}

std::string describe(const PrimitiveSpec& s) {
    std::vector<std::string> words;
    if (s.shape == Shape::Cone && s.flipped) words.push_back("upside-down");
    if (s.shape == Shape::Torus) {
        words.push_back(s.tube_ratio > 0.3 ? "thick" : "thin");
        if (s.flipped) words.push_back("standing");
    } else if (s.height_ratio < 0.7) {
        words.push_back("flat");
    } else if (s.height_ratio > 1.5) {
        words.push_back("tall");
    }
    if (s.length_ratio > 1.3) words.push_back(s.shape == Shape::Cylinder || s.shape == Shape::Torus ? "oval" : "long");
    switch (s.shape) {
        case Shape::Sphere: words.push_back(s.variant ? "dome" : "sphere"); break;
        case Shape::Box:
            if (s.variant) words.push_back("open");
            words.push_back("box");
            break;
        case Shape::Cylinder: words.push_back(s.variant ? "tube" : "cylinder"); break;
        case Shape::Cone:
            if (s.variant) words.push_back("truncated");
            words.push_back("cone");
            break;
        case Shape::Torus: words.push_back("torus"); break;
    }
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    const bool vowel = std::string("aeiou").find(text[0]) != std::string::npos;
    return (vowel ? "an " : "a ") + text;
}

PrimitiveSpec random_primitive(Shape shape, Rng& rng, std::size_t point_count) {
    PrimitiveSpec s;
    s.shape = shape;
    s.point_count = point_count;
    s.size = uniform(rng, 0.3, 1.0);
    s.color = kPalette[std::uniform_int_distribution<int>(0, 9)(rng)];
    auto coin = [&] { return std::bernoulli_distribution(0.5)(rng); };
    auto jitter = [&](double v) { return v * uniform(rng, 0.9, 1.1); };
    const double heights[3] = {0.45, 1.0, 2.1};
    if (shape == Shape::Torus) {
        s.tube_ratio = coin() ? 0.4 : 0.15;
        s.flipped = coin();
        s.length_ratio = coin() ? jitter(1.6) : 1.0;
    } else {
        s.height_ratio = jitter(heights[std::uniform_int_distribution<int>(0, 2)(rng)]);
        s.variant = coin();
        if (shape == Shape::Cone) s.flipped = coin();
        else s.length_ratio = coin() ? jitter(1.8) : 1.0;
    }
    s.caption = describe(s);
    return s;
}

PointCloud sample_primitive(const PrimitiveSpec& s, Rng& rng) {
    s.validate();
    PointCloud c;
    c.points.reserve(s.point_count);
    c.colors.assign(s.point_count, s.color);
    const double r = s.size;
    const Eigen::Matrix3d stand = Eigen::AngleAxisd(kPi / 2, Vec3::UnitX()).toRotationMatrix();
    for (std::size_t i = 0; i < s.point_count; ++i) {
        Surface f;
        switch (s.shape) {
            case Shape::Sphere:
                f = on_ellipsoid(Vec3(r * s.length_ratio, r, r * s.height_ratio), s.variant, rng);
                break;
            case Shape::Box: f = on_box(Vec3(r * s.length_ratio, r, r * s.height_ratio), s.variant, rng); break;
            case Shape::Cylinder: f = on_cylinder(r, r * s.height_ratio, s.length_ratio, s.variant, rng); break;
            case Shape::Cone:
                f = on_cone(r, 2 * r * s.height_ratio, s.variant, rng);
                if (s.flipped) {
                    f.p.z() = -f.p.z();
                    f.n.z() = -f.n.z();
                }
                break;
            case Shape::Torus:
                f = on_torus(r, r * s.tube_ratio, s.length_ratio, rng);
                if (s.flipped) {
                    f.p = stand * f.p;
                    f.n = stand * f.n;
                }
                break;
        }
        c.points.push_back(f.p + uniform(rng, -s.surface_noise, s.surface_noise) * f.n);
    }
    return c;
}

std::vector<CaptionedObject> make_primitives(std::size_t count_per_class, std::uint64_t seed, std::size_t point_count) {
    if (count_per_class < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
    std::vector<CaptionedObject> out;
    out.reserve(count_per_class * 5);
    std::size_t id = 0;
    for (std::size_t i = 0; i < count_per_class; ++i) {
        for (Shape shape : kAllShapes) {
            Rng rng(derive_seed({seed, id}));
            const auto spec = random_primitive(shape, rng, point_count);
            CaptionedObject obj{sample_primitive(spec, rng), spec.caption};
            char name[32];
            std::snprintf(name, sizeof(name), "prim_%05zu", id++);
            obj.cloud.id = name;
            out.push_back(std::move(obj));
        }
    }
    return out;
}

DatasetIndex gen_primitives(std::size_t count_per_class, std::uint64_t seed, const std::filesystem::path& out_dir,
                            std::size_t point_count) {
    return write_dataset(out_dir, make_primitives(count_per_class, seed, point_count));
}

}  // namespace sceneforge
