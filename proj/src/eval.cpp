// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

namespace sceneforge {

NComposedDataset build_ncomposed(const ObjectSet& base, std::size_t n, const SceneForge& forge, std::uint64_t seed,
                                 std::size_t target_points) {
    if (n < 1 || n > 10) throw Error(ErrorCode::InvalidArgument, "n must lie in [1, 10]");
    if (base.size() < n)
        throw Error(ErrorCode::DatasetTooSmall, "dataset holds " + std::to_string(base.size()) +
                                                    " objects, fewer than n = " + std::to_string(n));
    NComposedDataset ds;
    ds.n = n;
    ds.seed = seed;
    ds.scenes.reserve(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        Rng rng(derive_seed({seed, n, i}));
        EvalItem item;
        if (n == 1) {
            const auto& obj = *base[i];
            item.id = obj.cloud.id;
            item.cloud = subsample(normalize_unit_sphere(obj.cloud), target_points, rng,
                                   forge.options().subsample_method);
            item.caption = obj.caption;
            item.component_ids = {obj.cloud.id};
        } else {
            const auto spec = sample_spec(base, i, n, target_points, rng);
            ComposedScene scene = forge.forge(spec);
            item.id = scene.scene_id;
            item.component_ids = scene.component_ids();
            item.cloud = std::move(scene.cloud);
            item.caption = std::move(scene.refined_caption);
        }
        ds.scenes.push_back(std::move(item));
    }
    return ds;
}

namespace {

// rank of column `target` in `row`, ties broken by index
std::size_t stable_rank(const Eigen::RowVectorXd& row, Eigen::Index target) {
    const double v = row[target];
    std::size_t rank = 0;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        if (row[j] > v || (row[j] == v && j < target)) ++rank;
    }
    return rank;
}

}  // namespace

RetrievalReport retrieval_from_embeddings(const Eigen::MatrixXd& emb_3d, const Eigen::MatrixXd& emb_txt) {
    if (emb_3d.rows() == 0) throw Error(ErrorCode::EmptyDataset, "nothing to evaluate");
    if (emb_3d.rows() != emb_txt.rows() || emb_3d.cols() != emb_txt.cols())
        throw Error(ErrorCode::SizeMismatch, "embedding sets differ in shape");
    const Eigen::MatrixXd sim = emb_txt * emb_3d.transpose();  // text rows, cloud columns
    const Eigen::MatrixXd sim_t = sim.transpose();
    const auto n = sim.rows();
    std::size_t t1 = 0, t5 = 0, p1 = 0, p5 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto rt = stable_rank(sim.row(i), i);
        const auto rp = stable_rank(sim_t.row(i), i);
        t1 += rt < 1;
        t5 += rt < 5;
        p1 += rp < 1;
        p5 += rp < 5;
    }
    const double d = static_cast<double>(n);
    RetrievalReport r{t1 / d, t5 / d, p1 / d, p5 / d, 0.0};
    r.averaged_top1 = 0.5 * (r.top1_t2p + r.top1_p2t);
    return r;
}

RetrievalReport eval_retrieval(const CloudEncoderFn& encode_3d, const TextEncoderFn& encode_txt,
                               const NComposedDataset& dataset) {
    if (dataset.scenes.empty()) throw Error(ErrorCode::EmptyDataset, "evaluation set is empty");
    const auto n = static_cast<Eigen::Index>(dataset.scenes.size());
    const auto first = encode_3d(dataset.scenes.front().cloud);
    Eigen::MatrixXd e3(n, first.size()), et(n, first.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = dataset.scenes[static_cast<std::size_t>(i)];
        e3.row(i) = (i == 0 ? first : encode_3d(s.cloud)).transpose();
        et.row(i) = encode_txt(s.caption).transpose();
    }
    return retrieval_from_embeddings(e3, et);
}

std::vector<SweepRow> sweep_n(const CloudEncoderFn& encode_3d, const TextEncoderFn& encode_txt, const ObjectSet& base,
                              const SceneForge& forge, std::span<const std::size_t> n_range, std::uint64_t seed,
                              std::size_t target_points) {
    std::vector<SweepRow> rows;
    for (auto n : n_range) {
        const auto ds = build_ncomposed(base, n, forge, seed, target_points);
        rows.push_back({n, eval_retrieval(encode_3d, encode_txt, ds)});
    }
    return rows;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << "n,top1_t2p,top5_t2p,top1_p2t,top5_p2t,averaged_top1\n";
    out.precision(6);
    for (const auto& r : rows)
        out << r.n << ',' << r.report.top1_t2p << ',' << r.report.top5_t2p << ',' << r.report.top1_p2t << ','
            << r.report.top5_p2t << ',' << r.report.averaged_top1 << '\n';
}

// ---- repositioning ----

namespace {

struct TwoParts {
    std::vector<Vec3> a, b;
};

TwoParts split(const PointCloud& cloud, std::span<const std::uint16_t> source) {
    if (source.size() != cloud.size()) throw Error(ErrorCode::LengthMismatch, "source tags do not match the cloud");
    TwoParts p;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (source[i] == 0) p.a.push_back(cloud.points[i]);
        else if (source[i] == 1) p.b.push_back(cloud.points[i]);
    }
    if (p.a.empty() || p.b.empty()) throw Error(ErrorCode::InvalidArgument, "components 0 and 1 must both have points");
    return p;
}

double interval_overlap(double lo0, double hi0, double lo1, double hi1) {
    return std::max(0.0, std::min(hi0, hi1) - std::max(lo0, lo1));
}

double footprint_overlap(const Bounds& a, const Bounds& b) {
    const double inter = interval_overlap(a.min.x(), a.max.x(), b.min.x(), b.max.x()) *
                         interval_overlap(a.min.y(), a.max.y(), b.min.y(), b.max.y());
    const double area_a = (a.max.x() - a.min.x()) * (a.max.y() - a.min.y());
    const double area_b = (b.max.x() - b.min.x()) * (b.max.y() - b.min.y());
    const double smaller = std::min(area_a, area_b);
    return smaller > 1e-12 ? inter / smaller : (inter > 0.0 ? 1.0 : 0.0);
}

double vertical_overlap(const Bounds& a, const Bounds& b) {
    const double inter = interval_overlap(a.min.z(), a.max.z(), b.min.z(), b.max.z());
    const double smaller = std::min(a.max.z() - a.min.z(), b.max.z() - b.min.z());
    return smaller > 1e-12 ? inter / smaller : (inter > 0.0 ? 1.0 : 0.0);
}

// horizontal unit vector from centroid a to centroid b, x axis if they coincide
Vec3 centroid_direction(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    Vec3 d = centroid(b) - centroid(a);
    d.z() = 0.0;
    const double n = d.norm();
    return n > 1e-12 ? Vec3(d / n) : Vec3::UnitX();
}

double projection_gap(const std::vector<Vec3>& a, const std::vector<Vec3>& b, const Vec3& d) {
    double max_a = -std::numeric_limits<double>::infinity();
    double min_b = std::numeric_limits<double>::infinity();
    for (const auto& p : a) max_a = std::max(max_a, p.dot(d));
    for (const auto& p : b) min_b = std::min(min_b, p.dot(d));
    return min_b - max_a;
}

Vec3 box_centre(const Bounds& b) { return 0.5 * (b.min + b.max); }

constexpr double kMargin = 1e-3;

}  // namespace

bool relation_predicate(const PointCloud& cloud, std::span<const std::uint16_t> source, Relation rel,
                        const PredicateParams& params) {
    const auto parts = split(cloud, source);
    const Bounds b0 = bounds(parts.a), b1 = bounds(parts.b);
    switch (rel) {
        case Relation::Over:
            return b1.min.z() > b0.max.z() && footprint_overlap(b0, b1) >= params.min_overlap;
        case Relation::Under:
            return b1.max.z() < b0.min.z() && footprint_overlap(b0, b1) >= params.min_overlap;
        case Relation::NextTo: {
            if (vertical_overlap(b0, b1) < params.min_overlap) return false;
            Vec3 d = centroid(parts.b) - centroid(parts.a);
            d.z() = 0.0;
            if (d.norm() <= 1e-12) return false;
            return projection_gap(parts.a, parts.b, d.normalized()) >= 0.0;
        }
    }
    return false;
}

double predicate_violation(const PointCloud& cloud, std::span<const std::uint16_t> source, Relation rel,
                           const PredicateParams& params) {
    const auto parts = split(cloud, source);
    const Bounds b0 = bounds(parts.a), b1 = bounds(parts.b);
    const Vec3 dc = box_centre(b1) - box_centre(b0);
    switch (rel) {
        case Relation::Over:
        case Relation::Under: {
            const double gap = rel == Relation::Over ? b1.min.z() - b0.max.z() : b0.min.z() - b1.max.z();
            return std::max(0.0, kMargin - gap) + std::hypot(dc.x(), dc.y()) +
                   std::max(0.0, params.min_overlap + kMargin - footprint_overlap(b0, b1));
        }
        case Relation::NextTo: {
            const double gap = projection_gap(parts.a, parts.b, centroid_direction(parts.a, parts.b));
            return std::max(0.0, kMargin - gap) + std::abs(dc.z()) +
                   std::max(0.0, params.min_overlap + kMargin - vertical_overlap(b0, b1));
        }
    }
    return 0.0;
}

RepositionMethod parse_reposition_method(const std::string& name) {
    if (name == "coordinate") return RepositionMethod::Coordinate;
    if (name == "gradient") return RepositionMethod::Gradient;
    throw Error(ErrorCode::InvalidArgument, "unknown reposition method '" + name + "'");
}

PointCloud offset_component(const PointCloud& cloud, std::span<const std::uint16_t> source, std::uint16_t component,
                            const Vec3& offset) {
    if (source.size() != cloud.size()) throw Error(ErrorCode::LengthMismatch, "source tags do not match the cloud");
    PointCloud out = cloud;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (source[i] == component) out.points[i] += offset;
    }
    return out;
}

RepositionResult reposition(const PointCloud& cloud, std::span<const std::uint16_t> source, const SceneScorer& scorer,
                            const RepositionOptions& options) {
    if (!(options.step_size > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_size must be positive");
    auto score_at = [&](const Vec3& o) {
        const double s = scorer(offset_component(cloud, source, options.component, o), source);
        if (!std::isfinite(s)) throw Error(ErrorCode::NonFiniteScore, "scorer returned a non-finite value");
        return s;
    };

    RepositionResult r;
    double best = score_at(r.offset);
    r.trajectory.push_back(best);
    double step = options.step_size;
    for (std::size_t it = 0; it < options.steps && step >= options.min_step; ++it) {
        Vec3 cand = r.offset;
        double cand_score = best;
        if (options.method == RepositionMethod::Coordinate) {
            for (int axis = 0; axis < 3; ++axis) {
                for (double sign : {1.0, -1.0}) {
                    Vec3 o = r.offset;
                    o[axis] += sign * step;
                    const double s = score_at(o);
                    if (s > cand_score) {
                        cand_score = s;
                        cand = o;
                    }
                }
            }
        } else {
            Vec3 g;
            for (int axis = 0; axis < 3; ++axis) {
                Vec3 hi = r.offset, lo = r.offset;
                hi[axis] += options.fd_h;
                lo[axis] -= options.fd_h;
                g[axis] = (score_at(hi) - score_at(lo)) / (2.0 * options.fd_h);
            }
            if (g.norm() > 0.0) {
                const Vec3 o = r.offset + step * g.normalized();
                const double s = score_at(o);
                if (s > cand_score) {
                    cand_score = s;
                    cand = o;
                }
            }
        }
        if (cand_score > best) {
            best = cand_score;
            r.offset = cand;
        } else {
            step *= 0.5;
        }
        r.trajectory.push_back(best);
    }
    return r;
}

SceneScorer encoder_scorer(const ToyPointEncoder& encoder, Embedding target_text) {
    return [&encoder, text = std::move(target_text)](const PointCloud& cloud, std::span<const std::uint16_t>) {
        return cosine(encoder.encode(normalize_unit_sphere(cloud)), text);
    };
}

SceneScorer planted_scorer(Relation target, const PredicateParams& params) {
    return [target, params](const PointCloud& cloud, std::span<const std::uint16_t> source) {
        return -predicate_violation(cloud, source, target, params);
    };
}

}  // namespace sceneforge
