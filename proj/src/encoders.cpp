// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sceneforge/caption_forge.hpp"

namespace sceneforge {

namespace {

using Points = Eigen::Map<const Eigen::Matrix<double, 3, Eigen::Dynamic>>;

Points as_matrix(const PointCloud& cloud) {
    static_assert(sizeof(Vec3) == 3 * sizeof(double));
    return Points(cloud.points.front().data(), 3, static_cast<Eigen::Index>(cloud.size()));
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
    std::normal_distribution<double> n(0.0, stddev);
    Eigen::MatrixXd m(rows, cols);
    // fill in a fixed row-major order so the layout choice never changes values
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = n(rng);
    return m;
}

inline double leaky(double x) { return x > 0.0 ? x : ToyPointEncoder::kLeak * x; }
inline double leaky_grad(double x) { return x > 0.0 ? 1.0 : ToyPointEncoder::kLeak; }

Embedding unit(const Eigen::VectorXd& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        Embedding e = Embedding::Zero(v.size());
        e[0] = 1.0;
        return e;
    }
    return v / n;
}

}  // namespace

std::uint64_t checksum(const Eigen::MatrixXd& m, std::uint64_t basis) {
    std::uint64_t h = fnv1a(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double), basis);
    const std::int64_t shape[2] = {m.rows(), m.cols()};
    return fnv1a(shape, sizeof(shape), h);
}

std::uint64_t checksum(const std::vector<Tensor>& tensors) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& t : tensors) h = checksum(t.value, fnv1a(t.name, h));
    return h;
}

double cosine(const Embedding& a, const Embedding& b) {
    const double d = a.norm() * b.norm();
    return d > 0.0 ? a.dot(b) / d : 0.0;
}

ToyPointEncoder::ToyPointEncoder(int hidden, int dim, std::uint64_t seed) {
    if (hidden < 1 || dim < 1) throw Error(ErrorCode::InvalidArgument, "encoder sizes must be positive");
    Rng rng(seed);
    params_ = {
        {"w1", gaussian(hidden, 3, std::sqrt(2.0 / 3.0), rng)},
        {"b1", Eigen::MatrixXd::Zero(hidden, 1)},
        {"w2", gaussian(hidden, hidden, std::sqrt(2.0 / hidden), rng)},
        {"b2", Eigen::MatrixXd::Zero(hidden, 1)},
        {"w3", gaussian(dim, hidden, std::sqrt(1.0 / hidden), rng)},
        {"b3", Eigen::MatrixXd::Zero(dim, 1)},
    };
}

ToyPointEncoder::ToyPointEncoder(std::vector<Tensor> params) : params_(std::move(params)) {
    static const char* names[] = {"w1", "b1", "w2", "b2", "w3", "b3"};
    if (params_.size() != 6) throw Error(ErrorCode::InvalidArgument, "encoder needs 6 tensors");
    for (int i = 0; i < 6; ++i) {
        if (params_[i].name != names[i])
            throw Error(ErrorCode::InvalidArgument, "unexpected tensor '" + params_[i].name + "'");
    }
    const auto h = params_[B1].value.rows();
    const auto d = params_[B3].value.rows();
    if (params_[W1].value.rows() != h || params_[W1].value.cols() != 3 || params_[W2].value.rows() != h ||
        params_[W2].value.cols() != h || params_[B2].value.rows() != h || params_[W3].value.rows() != d ||
        params_[W3].value.cols() != h)
        throw Error(ErrorCode::SizeMismatch, "encoder tensor shapes are inconsistent");
}

std::vector<Tensor> ToyPointEncoder::zero_grads() const {
    std::vector<Tensor> g;
    for (const auto& p : params_) g.push_back({p.name, Eigen::MatrixXd::Zero(p.value.rows(), p.value.cols())});
    return g;
}

Embedding ToyPointEncoder::encode(const PointCloud& cloud) const {
    Cache c;
    return forward(cloud, c);
}

Embedding ToyPointEncoder::forward(const PointCloud& cloud, Cache& cache) const {
    if (cloud.empty()) throw Error(ErrorCode::InvalidArgument, "cannot encode an empty cloud");
    const auto& w1 = params_[W1].value;
    const auto& w2 = params_[W2].value;
    const Eigen::Index h = w1.rows();

    Eigen::MatrixXd a1 = w1 * as_matrix(cloud);
    a1.colwise() += params_[B1].value.col(0);
    a1 = a1.unaryExpr(&leaky);
    Eigen::MatrixXd a2 = w2 * a1;
    a2.colwise() += params_[B2].value.col(0);

    cache.pooled.resize(h);
    cache.argmax.assign(static_cast<std::size_t>(h), 0);
    for (Eigen::Index k = 0; k < h; ++k) {
        Eigen::Index arg = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < a2.cols(); ++i) {
            if (a2(k, i) > best) {  // first maximum wins, so ties are order-stable
                best = a2(k, i);
                arg = i;
            }
        }
        // leaky ReLU is monotone, so pooling the pre-activation is equivalent
        cache.pooled[k] = leaky(best);
        cache.argmax[static_cast<std::size_t>(k)] = arg;
    }
    Eigen::VectorXd u = params_[W3].value * cache.pooled + params_[B3].value.col(0);
    cache.norm = u.norm();
    cache.out = unit(u);
    return cache.out;
}

void ToyPointEncoder::backward(const PointCloud& cloud, const Cache& cache, const Embedding& d_out,
                               std::vector<Tensor>& grads) const {
    const auto& w1 = params_[W1].value;
    const auto& w2 = params_[W2].value;
    const auto& w3 = params_[W3].value;
    const Eigen::Index h = w1.rows();
    if (!(cache.norm > 0.0)) return;

    const Eigen::VectorXd du = (d_out - cache.out * cache.out.dot(d_out)) / cache.norm;
    grads[W3].value.noalias() += du * cache.pooled.transpose();
    grads[B3].value.col(0) += du;
    const Eigen::VectorXd dpool = w3.transpose() * du;

    // only winning points receive gradient; revisit each distinct one once
    std::vector<Eigen::Index> winners(cache.argmax.begin(), cache.argmax.end());
    std::sort(winners.begin(), winners.end());
    winners.erase(std::unique(winners.begin(), winners.end()), winners.end());
    for (auto i : winners) {
        const Vec3& x = cloud.points[static_cast<std::size_t>(i)];
        const Eigen::VectorXd a1 = w1 * x + params_[B1].value.col(0);
        const Eigen::VectorXd z1 = a1.unaryExpr(&leaky);
        const Eigen::VectorXd a2 = w2 * z1 + params_[B2].value.col(0);
        Eigen::VectorXd da2 = Eigen::VectorXd::Zero(h);
        for (Eigen::Index k = 0; k < h; ++k) {
            if (cache.argmax[static_cast<std::size_t>(k)] == i) da2[k] = dpool[k] * leaky_grad(a2[k]);
        }
        grads[W2].value.noalias() += da2 * z1.transpose();
        grads[B2].value.col(0) += da2;
        Eigen::VectorXd da1 = w2.transpose() * da2;
        for (Eigen::Index k = 0; k < h; ++k) da1[k] *= leaky_grad(a1[k]);
        grads[W1].value.noalias() += da1 * x.transpose();
        grads[B1].value.col(0) += da1;
    }
}

FrozenTextEncoder::FrozenTextEncoder(int dim, std::uint64_t seed, std::size_t table_rows, bool bigrams)
    : seed_(seed), bigrams_(bigrams) {
    if (dim < 1 || table_rows < 1) throw Error(ErrorCode::InvalidArgument, "text encoder sizes must be positive");
    Rng rng(derive_seed({seed, 0x7e47}));
    table_ = gaussian(static_cast<Eigen::Index>(table_rows), dim, 1.0, rng);
}

std::vector<std::string> FrozenTextEncoder::tokens(const std::string& text) const {
    auto words = word_tokens(text);
    std::vector<std::string> out = words;
    if (bigrams_) {
        for (std::size_t i = 0; i + 1 < words.size(); ++i) out.push_back(words[i] + ' ' + words[i + 1]);
    }
    return out;
}

Embedding FrozenTextEncoder::encode(const std::string& text) const {
    const auto toks = tokens(text);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(table_.cols());
    for (const auto& t : toks) {
        const auto row = static_cast<Eigen::Index>(fnv1a(t, seed_ ^ 0xcbf29ce484222325ULL) %
                                                   static_cast<std::uint64_t>(table_.rows()));
        acc += table_.row(row).transpose();
    }
    if (!toks.empty()) acc /= static_cast<double>(toks.size());
    return unit(acc);
}

std::uint64_t FrozenTextEncoder::checksum() const { return sceneforge::checksum(table_, seed_); }

FrozenImageSurrogate::FrozenImageSurrogate(int dim, std::uint64_t seed) {
    if (dim < 1) throw Error(ErrorCode::InvalidArgument, "surrogate dim must be positive");
    Rng rng(derive_seed({seed, 0x2d}));
    map_ = gaussian(dim, kGrid * kGrid * kGrid, 1.0, rng);
}

Eigen::VectorXd FrozenImageSurrogate::occupancy(const PointCloud& object) {
    Eigen::VectorXd occ = Eigen::VectorXd::Zero(kGrid * kGrid * kGrid);
    const PointCloud n = normalize_unit_sphere(object);
    auto cell = [](double v) {
        const int c = static_cast<int>(std::floor((v + 1.0) * 0.5 * kGrid));
        return std::clamp(c, 0, kGrid - 1);
    };
    for (const auto& p : n.points) occ[(cell(p.x()) * kGrid + cell(p.y())) * kGrid + cell(p.z())] = 1.0;
    return occ;
}

Embedding FrozenImageSurrogate::encode(const PointCloud& object) const {
    // centre the occupancy so the map does not collapse onto its mean direction
    Eigen::VectorXd occ = occupancy(object);
    occ.array() -= occ.mean();
    return unit(map_ * occ);
}

std::uint64_t FrozenImageSurrogate::checksum() const { return sceneforge::checksum(map_); }

}  // namespace sceneforge
