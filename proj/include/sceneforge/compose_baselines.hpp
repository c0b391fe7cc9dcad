// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sceneforge/caption_forge.hpp"
#include "sceneforge/pointcloud.hpp"

namespace sceneforge {

enum class MixMethod { CutMixR, CutMixK, MixUp };
enum class MixupMatching { Greedy, Random };

MixMethod parse_mix_method(const std::string& name);  // cutmix-r | cutmix-k | mixup
MixupMatching parse_mixup_matching(const std::string& name);

struct MixSpec {
    MixMethod method = MixMethod::CutMixR;
    double lambda = 0.5;  // share of b in the output
    std::uint64_t seed = 0;
    MixupMatching matching = MixupMatching::Greedy;

    void validate() const;
};

// lambda ~ Beta(1, 1)
double sample_lambda(Rng& rng);

struct MixResult {
    PointCloud cloud;
    std::vector<std::uint8_t> source;  // 0 = a, 1 = b; mixup tags every point 0
};

MixResult cutmix_r(const PointCloud& a, const PointCloud& b, double lambda, Rng& rng);
MixResult cutmix_k(const PointCloud& a, const PointCloud& b, double lambda, Rng& rng);
MixResult mixup(const PointCloud& a, const PointCloud& b, double lambda, Rng& rng,
                MixupMatching matching = MixupMatching::Greedy);

MixResult mix(const PointCloud& a, const PointCloud& b, const MixSpec& spec);

// "<t_a> and <t_b>"
RawCaption baseline_caption(const std::string& t_a, const std::string& t_b);

}  // namespace sceneforge
