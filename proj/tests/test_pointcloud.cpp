// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "sceneforge/dataset.hpp"
#include "sceneforge/ply.hpp"
#include "sceneforge/pointcloud.hpp"

using namespace sceneforge;
namespace fs = std::filesystem;

namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed, bool colors = false) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointCloud c;
    for (std::size_t i = 0; i < n; ++i) {
        c.points.emplace_back(g(rng), g(rng), g(rng));
        if (colors) c.colors.emplace_back(u(rng), u(rng), u(rng));
    }
    return c;
}

fs::path scratch_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("sceneforge_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

}  // namespace

TEST_SUITE("pointcloud") {

TEST_CASE("validate rejects empty, mismatched and non-finite clouds") {
    PointCloud c;
    CHECK_THROWS_AS(c.validate(), Error);
    c.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    c.colors = {Vec3(0, 0, 0)};
    try {
        c.validate();
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SizeMismatch);
    }
    c.colors.clear();
    c.points[1].x() = std::numeric_limits<double>::quiet_NaN();
    try {
        c.validate();
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteCoordinate);
    }
}

TEST_CASE("normalize_unit_sphere centres at the origin with max norm one") {
    auto c = random_cloud(500, 3);
    for (auto& p : c.points) p = 7.0 * p + Vec3(3, -2, 10);
    auto n = normalize_unit_sphere(c);
    Vec3 mean = Vec3::Zero();
    double max_norm = 0.0;
    for (const auto& p : n.points) {
        mean += p;
        max_norm = std::max(max_norm, p.norm());
    }
    mean /= static_cast<double>(n.size());
    CHECK(mean.norm() < 1e-12);
    CHECK(max_norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalize of a single repeated point gives zeros") {
    PointCloud c;
    c.points.assign(10, Vec3(4, 5, 6));
    auto n = normalize_unit_sphere(c);
    for (const auto& p : n.points) CHECK(p.norm() == 0.0);
}

TEST_CASE("subsample without replacement when the cloud is large enough") {
    Rng rng(11);
    auto idx = subsample_indices(1000, 256, rng);
    CHECK(idx.size() == 256);
    std::set<std::size_t> uniq(idx.begin(), idx.end());
    CHECK(uniq.size() == 256);
    CHECK(*uniq.rbegin() < 1000);
}

TEST_CASE("subsample pads with repeats and keeps every row when too small") {
    Rng rng(12);
    auto idx = subsample_indices(10, 64, rng);
    CHECK(idx.size() == 64);
    std::set<std::size_t> uniq(idx.begin(), idx.end());
    CHECK(uniq.size() == 10);
}

TEST_CASE("subsample rejects zero sizes") {
    Rng rng(1);
    CHECK_THROWS_AS(subsample_indices(0, 4, rng), Error);
    CHECK_THROWS_AS(subsample_indices(4, 0, rng), Error);
}

TEST_CASE("farthest point sampling picks distinct spread points") {
    // two tight clusters: fps with 2 picks must take one from each
    PointCloud c;
    for (int i = 0; i < 50; ++i) c.points.emplace_back(0.001 * i, 0, 0);
    for (int i = 0; i < 50; ++i) c.points.emplace_back(10 + 0.001 * i, 0, 0);
    Rng rng(5);
    auto idx = fps_indices(c.points, 2, rng);
    REQUIRE(idx.size() == 2);
    CHECK((idx[0] < 50) != (idx[1] < 50));
    auto more = fps_indices(c.points, 40, rng);
    CHECK(std::set<std::size_t>(more.begin(), more.end()).size() == 40);
}

TEST_CASE("subsample is deterministic per rng state") {
    auto c = random_cloud(300, 4);
    Rng a(9), b(9);
    auto x = subsample(c, 100, a, SubsampleMethod::Fps);
    auto y = subsample(c, 100, b, SubsampleMethod::Fps);
    CHECK(x.points == y.points);
}

TEST_CASE("parse_subsample_method") {
    CHECK(parse_subsample_method("uniform") == SubsampleMethod::Uniform);
    CHECK(parse_subsample_method("fps") == SubsampleMethod::Fps);
    CHECK_THROWS_AS(parse_subsample_method("random"), Error);
}

TEST_CASE("concat keeps order and colors only when both sides have them") {
    auto a = random_cloud(3, 1, true);
    auto b = random_cloud(2, 2, true);
    auto ab = concat(a, b);
    CHECK(ab.size() == 5);
    CHECK(ab.points[3] == b.points[0]);
    CHECK(ab.colors.size() == 5);
    auto plain = concat(a, random_cloud(2, 2, false));
    CHECK(!plain.has_colors());
}

TEST_CASE("binary PLY round trip at float precision") {
    auto c = random_cloud(200, 21, true);
    auto back = parse_ply(encode_ply(c, PlyFormat::BinaryLittleEndian), "rt");
    REQUIRE(back.size() == c.size());
    REQUIRE(back.has_colors());
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK((back.points[i] - c.points[i]).cwiseAbs().maxCoeff() < 1e-6 * (1.0 + c.points[i].norm()));
        CHECK((back.colors[i] - c.colors[i]).cwiseAbs().maxCoeff() <= 0.5 / 255.0 + 1e-12);
    }
}

TEST_CASE("ascii PLY round trip") {
    auto c = random_cloud(50, 22);
    auto back = parse_ply(encode_ply(c, PlyFormat::Ascii), "rt");
    REQUIRE(back.size() == 50);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK((back.points[i] - c.points[i]).norm() < 1e-5);
}

TEST_CASE("encoding is byte stable") {
    auto c = random_cloud(64, 23, true);
    CHECK(encode_ply(c) == encode_ply(c));
}

TEST_CASE("ascii PLY with extra properties and double coordinates") {
    const std::string text =
        "ply\nformat ascii 1.0\ncomment hi\nelement vertex 2\nproperty double x\nproperty float nx\n"
        "property double y\nproperty double z\nelement face 0\nproperty list uchar int vertex_indices\n"
        "end_header\n1 9 2 3\n4 9 5 6\n";
    auto c = parse_ply(text, "x");
    REQUIRE(c.size() == 2);
    CHECK(c.points[1] == Vec3(4, 5, 6));
    CHECK(!c.has_colors());
}

TEST_CASE("malformed PLY inputs") {
    auto code_of = [](const std::string& s) {
        try {
            parse_ply(s, "bad");
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;  // sentinel: did not throw
    };
    CHECK(code_of("plx\n") == ErrorCode::UnsupportedPly);
    CHECK(code_of("ply\nformat binary_big_endian 1.0\nelement vertex 1\nproperty float x\nend_header\n") ==
          ErrorCode::UnsupportedPly);
    CHECK(code_of("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float "
                  "z\n") == ErrorCode::TruncatedFile);
    CHECK(code_of("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float "
                  "z\nend_header\n1 2 3\n") == ErrorCode::TruncatedFile);
    CHECK(code_of("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float "
                  "z\nend_header\n1 nan 3\n") == ErrorCode::NonFiniteCoordinate);
    CHECK(code_of("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nend_header\n1 2\n") ==
          ErrorCode::UnsupportedPly);

    // binary body cut short
    auto bytes = encode_ply(random_cloud(10, 1));
    bytes.resize(bytes.size() - 5);
    CHECK(code_of(bytes) == ErrorCode::TruncatedFile);
}

TEST_CASE("load_dataset happy path and error codes") {
    auto root = scratch_dir("dataset");
    fs::create_directories(root / "objects");
    write_cloud(root / "objects" / "a.ply", random_cloud(80, 1));
    write_cloud(root / "objects" / "b.ply", random_cloud(90, 2));
    write_text(root / "captions.jsonl", "{\"id\": \"a\", \"caption\": \"a box\"}\n\n{\"id\": \"b\", \"caption\": \"a ball\"}\n");
    auto idx = load_dataset(root);
    CHECK(idx.cardinality() == 2);
    auto objs = load_objects(idx);
    CHECK(objs[1].cloud.size() == 90);
    CHECK(objs[1].caption == "a ball");
    CHECK(objs[0].cloud.id == "a");

    auto code_of = [&] {
        try {
            load_dataset(root);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    write_text(root / "captions.jsonl", "{\"id\": \"a\", \"caption\": \"x\"}\n{\"id\": \"a\", \"caption\": \"y\"}\n");
    CHECK(code_of() == ErrorCode::DuplicateId);
    write_text(root / "captions.jsonl", "{\"id\": \"a\", \"caption\": \"x\"}\n{\"id\": \"zz\", \"caption\": \"y\"}\n");
    CHECK(code_of() == ErrorCode::MissingCloud);
    write_text(root / "captions.jsonl", "{\"id\": \"a\" \"caption\": \"x\"}\n");
    CHECK(code_of() == ErrorCode::MalformedJsonl);
    write_text(root / "captions.jsonl", "{\"id\": 3, \"caption\": \"x\"}\n");
    CHECK(code_of() == ErrorCode::MalformedJsonl);
    fs::remove(root / "captions.jsonl");
    CHECK(code_of() == ErrorCode::MissingCaptions);
    fs::remove_all(root / "objects");
    CHECK(code_of() == ErrorCode::EmptyDataset);
    fs::remove_all(root);
}

}  // TEST_SUITE
