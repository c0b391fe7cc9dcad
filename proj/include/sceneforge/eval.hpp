// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sceneforge/encoders.hpp"
#include "sceneforge/relations.hpp"
#include "sceneforge/scene_forge.hpp"

namespace sceneforge {

struct EvalItem {
    std::string id;
    PointCloud cloud;
    std::string caption;
    std::vector<std::string> component_ids;
};

struct NComposedDataset {
    std::size_t n = 1;
    std::uint64_t seed = 0;
    std::vector<EvalItem> scenes;  // scenes[i] is anchored at base object i
};

/// One scene per base object. n == 1 keeps the objects as they are
/// (normalized and subsampled to target_points) with their own captions.
NComposedDataset build_ncomposed(const ObjectSet& base, std::size_t n, const SceneForge& forge, std::uint64_t seed,
                                 std::size_t target_points);

struct RetrievalReport {
    double top1_t2p = 0.0;
    double top5_t2p = 0.0;
    double top1_p2t = 0.0;
    double top5_p2t = 0.0;
    double averaged_top1 = 0.0;
};

using CloudEncoderFn = std::function<Embedding(const PointCloud&)>;
using TextEncoderFn = std::function<Embedding(const std::string&)>;

/// Row i of each matrix is the pair. Ties in similarity rank the lower index first.
RetrievalReport retrieval_from_embeddings(const Eigen::MatrixXd& emb_3d, const Eigen::MatrixXd& emb_txt);

RetrievalReport eval_retrieval(const CloudEncoderFn& encode_3d, const TextEncoderFn& encode_txt,
                               const NComposedDataset& dataset);

struct SweepRow {
    std::size_t n = 1;
    RetrievalReport report;
};

std::vector<SweepRow> sweep_n(const CloudEncoderFn& encode_3d, const TextEncoderFn& encode_txt, const ObjectSet& base,
                              const SceneForge& forge, std::span<const std::size_t> n_range, std::uint64_t seed,
                              std::size_t target_points);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

// ---- repositioning ----

struct PredicateParams {
    double min_overlap = 0.25;
};

/// Geometric check on components 0 and 1 of a source-tagged cloud.
bool relation_predicate(const PointCloud& cloud, std::span<const std::uint16_t> source, Relation rel,
                        const PredicateParams& params = {});

/// Non-negative distance from the target relation: a separation deficit along
/// the relation axis, the offset between the two bounding-box centres across
/// it, and any overlap shortfall.
double predicate_violation(const PointCloud& cloud, std::span<const std::uint16_t> source, Relation rel,
                           const PredicateParams& params = {});

using SceneScorer = std::function<double(const PointCloud&, std::span<const std::uint16_t>)>;

enum class RepositionMethod { Coordinate, Gradient };
RepositionMethod parse_reposition_method(const std::string& name);

struct RepositionOptions {
    std::size_t steps = 60;
    double step_size = 0.25;
    double min_step = 1e-4;
    RepositionMethod method = RepositionMethod::Coordinate;
    double fd_h = 1e-3;  // finite-difference width for the gradient method
    std::uint16_t component = 1;
};

struct RepositionResult {
    Vec3 offset = Vec3::Zero();
    std::vector<double> trajectory;  // best score after each step, starting with the initial score
};

PointCloud offset_component(const PointCloud& cloud, std::span<const std::uint16_t> source, std::uint16_t component,
                            const Vec3& offset);

RepositionResult reposition(const PointCloud& cloud, std::span<const std::uint16_t> source, const SceneScorer& scorer,
                            const RepositionOptions& options);

/// cosine(point encoder(normalized scene), target text embedding)
SceneScorer encoder_scorer(const ToyPointEncoder& encoder, Embedding target_text);

/// -predicate_violation for the target relation.
SceneScorer planted_scorer(Relation target, const PredicateParams& params = {});

}  // namespace sceneforge
