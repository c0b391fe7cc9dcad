// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/compose_baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sceneforge {

namespace {

void check_pair(const PointCloud& a, const PointCloud& b, double lambda) {
    if (a.size() != b.size())
        throw Error(ErrorCode::SizeMismatch, "mix inputs differ in size: " + std::to_string(a.size()) + " vs " +
                                                 std::to_string(b.size()));
    if (a.empty()) throw Error(ErrorCode::SizeMismatch, "mix inputs are empty");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must lie in [0, 1]");
}

std::size_t replaced_count(std::size_t n, double lambda) {
    return std::min(n, static_cast<std::size_t>(std::floor(lambda * static_cast<double>(n))));
}

// indices of `pts` ordered by distance to q, ties by index
std::vector<std::size_t> rank_by_distance(const std::vector<Vec3>& pts, const Vec3& q) {
    std::vector<double> d(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) d[i] = (pts[i] - q).squaredNorm();
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
    return order;
}

MixResult start_from(const PointCloud& a, const PointCloud& b) {
    MixResult r;
    r.cloud = a;
    r.cloud.id.clear();
    if (!b.has_colors()) r.cloud.colors.clear();
    r.source.assign(a.size(), 0);
    return r;
}

void put(MixResult& r, std::size_t slot, const PointCloud& b, std::size_t from) {
    r.cloud.points[slot] = b.points[from];
    if (r.cloud.has_colors()) r.cloud.colors[slot] = b.colors[from];
    r.source[slot] = 1;
}

}  // namespace

MixMethod parse_mix_method(const std::string& name) {
    if (name == "cutmix-r") return MixMethod::CutMixR;
    if (name == "cutmix-k") return MixMethod::CutMixK;
    if (name == "mixup") return MixMethod::MixUp;
    throw Error(ErrorCode::InvalidArgument, "unknown mix method '" + name + "'");
}

MixupMatching parse_mixup_matching(const std::string& name) {
    if (name == "greedy") return MixupMatching::Greedy;
    if (name == "random") return MixupMatching::Random;
    throw Error(ErrorCode::InvalidArgument, "unknown mixup matching '" + name + "'");
}

void MixSpec::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must lie in [0, 1]");
}

double sample_lambda(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

MixResult cutmix_r(const PointCloud& a, const PointCloud& b, double lambda, Rng& rng) {
    check_pair(a, b, lambda);
    const std::size_t n = a.size();
    const std::size_t m = replaced_count(n, lambda);
    MixResult r = start_from(a, b);
    if (m == 0) return r;

    auto slots = subsample_indices(n, m, rng);
    auto from = subsample_indices(n, m, rng);
    for (std::size_t i = 0; i < m; ++i) put(r, slots[i], b, from[i]);
    return r;
}

MixResult cutmix_k(const PointCloud& a, const PointCloud& b, double lambda, Rng& rng) {
    check_pair(a, b, lambda);
    const std::size_t n = a.size();
    const std::size_t m = replaced_count(n, lambda);
    MixResult r = start_from(a, b);
    if (m == 0) return r;

    const Vec3 q = a.points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)];
    const auto in_a = rank_by_distance(a.points, q);
    const auto in_b = rank_by_distance(b.points, q);
    for (std::size_t i = 0; i < m; ++i) put(r, in_a[i], b, in_b[i]);
    return r;
}

MixResult mixup(const PointCloud& a, const PointCloud& b, double lambda, Rng& rng, MixupMatching matching) {
    check_pair(a, b, lambda);
    const std::size_t n = a.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::size_t> match(n);
    if (matching == MixupMatching::Random) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < n; ++i) match[order[i]] = perm[i];
    } else {
        std::vector<char> used(n, 0);
        for (auto i : order) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (used[j]) continue;
                const double d = (a.points[i] - b.points[j]).squaredNorm();
                if (d < best) {
                    best = d;
                    arg = j;
                }
            }
            used[arg] = 1;
            match[i] = arg;
        }
    }

    MixResult r = start_from(a, b);
    const bool colors = a.has_colors() && b.has_colors();
    if (!colors) r.cloud.colors.clear();
    for (std::size_t i = 0; i < n; ++i) {
        // lambda == 0 and 1 must reproduce the parents exactly
        if (lambda == 0.0) continue;
        if (lambda == 1.0) {
            r.cloud.points[i] = b.points[match[i]];
            if (colors) r.cloud.colors[i] = b.colors[match[i]];
            continue;
        }
        r.cloud.points[i] = (1.0 - lambda) * a.points[i] + lambda * b.points[match[i]];
        if (colors) r.cloud.colors[i] = (1.0 - lambda) * a.colors[i] + lambda * b.colors[match[i]];
    }
    return r;
}

MixResult mix(const PointCloud& a, const PointCloud& b, const MixSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    switch (spec.method) {
        case MixMethod::CutMixR: return cutmix_r(a, b, spec.lambda, rng);
        case MixMethod::CutMixK: return cutmix_k(a, b, spec.lambda, rng);
        case MixMethod::MixUp: return mixup(a, b, spec.lambda, rng, spec.matching);
    }
    throw Error(ErrorCode::InvalidArgument, "bad mix method");
}

RawCaption baseline_caption(const std::string& t_a, const std::string& t_b) {
    auto strip = [](const std::string& t) {
        std::string s = trim(t);
        while (!s.empty() && s.back() == '.') s.pop_back();
        s = trim(s);
        if (s.empty()) throw Error(ErrorCode::EmptyCaption, "baseline caption input is empty");
        return s;
    };
    RawCaption raw;
    raw.parts.push_back({strip(t_a), ""});
    raw.parts.push_back({strip(t_b), "and"});
    raw.text = join_parts(raw.parts);
    return raw;
}

}  // namespace sceneforge
