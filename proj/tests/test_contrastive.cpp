// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "sceneforge/checkpoint.hpp"
#include "sceneforge/contrastive.hpp"
#include "sceneforge/trainer.hpp"

using namespace sceneforge;

namespace {

std::vector<std::size_t> iota_n(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

PointCloud blob(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, 0.5);
    PointCloud c;
    for (std::size_t i = 0; i < n; ++i) c.points.emplace_back(g(rng), g(rng), g(rng));
    return c;
}

// max relative error of info_nce gradients against central differences
double info_nce_grad_error(int b, int dim, double tau, std::uint64_t seed) {
    auto a = oracle::random_unit_rows(b, dim, seed);
    auto t = oracle::random_unit_rows(b, dim, seed + 1000);
    const auto sub = iota_n(static_cast<std::size_t>(b));
    const double h = 1e-5;
    const auto r = info_nce(a, t, sub, std::log(tau));
    double worst = 0.0;
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j < dim; ++j) {
            auto fa = [&](double d) {
                auto x = a;
                x(i, j) += d;
                return oracle::info_nce_dir(x, t, sub, tau);
            };
            auto ft = [&](double d) {
                auto x = t;
                x(i, j) += d;
                return oracle::info_nce_dir(a, x, sub, tau);
            };
            worst = std::max(worst, oracle::rel_err(r.grad_anchors(i, j), oracle::central_diff(fa, h)));
            worst = std::max(worst, oracle::rel_err(r.grad_targets(i, j), oracle::central_diff(ft, h)));
        }
    }
    auto fl = [&](double d) { return oracle::info_nce_dir(a, t, sub, std::exp(std::log(tau) + d)); };
    worst = std::max(worst, oracle::rel_err(r.grad_log_tau, oracle::central_diff(fl, h)));
    return worst;
}

}  // namespace

TEST_SUITE("contrastive") {

TEST_CASE("info_nce degenerate values") {
    auto a = oracle::random_unit_rows(1, 8, 1);
    auto t = oracle::random_unit_rows(1, 8, 2);
    std::vector<std::size_t> one{0};
    CHECK(info_nce(a, t, one, std::log(0.07)).loss == doctest::Approx(0.0).epsilon(1e-12));
    for (int b : {2, 4, 8}) {
        Eigen::MatrixXd same = Eigen::MatrixXd::Zero(b, 5);
        same.col(0).setOnes();
        CHECK(info_nce(same, same, iota_n(static_cast<std::size_t>(b)), std::log(0.07)).loss ==
              doctest::Approx(std::log(b)).epsilon(1e-12));
    }
}

TEST_CASE("info_nce value matches the definition") {
    auto a = oracle::random_unit_rows(6, 16, 3);
    auto t = oracle::random_unit_rows(6, 16, 4);
    std::vector<std::size_t> sub{0, 2, 3, 5};
    const auto r = info_nce(a, t, sub, std::log(0.2));
    CHECK(r.loss == doctest::Approx(oracle::info_nce_dir(a, t, sub, 0.2)).epsilon(1e-12));
    // rows outside the subset get no gradient
    CHECK(r.grad_anchors.row(1).norm() == 0.0);
    CHECK(r.grad_targets.row(4).norm() == 0.0);
}

TEST_CASE("info_nce gradients match finite differences over the grid") {
    for (int b : {2, 4, 8})
        for (int dim : {4, 16, 32})
            for (double tau : {0.05, 0.5, 1.0}) {
                INFO("B=" << b << " dim=" << dim << " tau=" << tau);
                CHECK(info_nce_grad_error(b, dim, tau, static_cast<std::uint64_t>(b * 100 + dim)) < 1e-4);
            }
    CHECK(info_nce_grad_error(8, 16, 0.07, 99) < 1e-4);
}

TEST_CASE("info_nce input checks") {
    auto a = oracle::random_unit_rows(3, 4, 1);
    std::vector<std::size_t> none, bad{5}, all{0, 1, 2};
    CHECK_THROWS_AS(info_nce(a, a, none, 0.0), Error);
    CHECK_THROWS_AS(info_nce(a, a, bad, 0.0), Error);
    auto big = a;
    big.row(1) *= 1.01;
    try {
        info_nce(big, a, all, 0.0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnnormalizedEmbedding);
    }
}

TEST_CASE("2D block weight") {
    CHECK(block_weight_2d(0.0, 8, 8, false) == 1.0);
    CHECK(block_weight_2d(0.25, 8, 6, false) == doctest::Approx(4.0 / 3.0));
    CHECK(block_weight_2d(0.5, 8, 4, false) == 2.0);
    CHECK(block_weight_2d(0.5, 8, 0, false) == 0.0);
    CHECK(block_weight_2d(0.5, 8, 2, true) == 4.0);
    try {
        block_weight_2d(1.0, 8, 1, false);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InconsistentConfig);
    }
}

TEST_CASE("total loss structure") {
    const int b = 6, dim = 8;
    auto e3 = oracle::random_unit_rows(b, dim, 10);
    auto et = oracle::random_unit_rows(b, dim, 11);
    auto e2 = oracle::random_unit_rows(b, dim, 12);
    std::vector<bool> composed{false, true, false, true, true, false};
    std::vector<std::size_t> singles{0, 2, 5};
    LossConfig cfg;
    cfg.alpha = 0.5;
    const double tau = std::exp(cfg.log_tau);
    auto r = total_loss(e3, et, e2, composed, cfg);
    CHECK(r.weight_2d == 2.0);
    CHECK(r.txt3d == doctest::Approx(oracle::info_nce(e3, et, iota_n(b), tau)).epsilon(1e-12));
    CHECK(r.img3d == doctest::Approx(oracle::info_nce(e3, e2, singles, tau)).epsilon(1e-12));
    CHECK(r.total == doctest::Approx(r.txt3d + 2.0 * r.img3d).epsilon(1e-12));

    // alpha = 0: unit weight, everything single
    std::vector<bool> none(b, false);
    cfg.alpha = 0.0;
    auto r0 = total_loss(e3, et, e2, none, cfg);
    CHECK(r0.total == doctest::Approx(oracle::info_nce(e3, et, iota_n(b), tau) +
                                      oracle::info_nce(e3, e2, iota_n(b), tau))
                          .epsilon(1e-12));

    // all composed: the 2D block is exactly zero
    std::vector<bool> all(b, true);
    cfg.alpha = 1.0;
    auto r1 = total_loss(e3, et, e2, all, cfg);
    CHECK(r1.img3d == 0.0);
    CHECK(r1.grad_3d_img.norm() == 0.0);
    CHECK(r1.total == r1.txt3d);
}

TEST_CASE("composed samples never touch the 2D block") {
    const int b = 8, dim = 16;
    auto e3 = oracle::random_unit_rows(b, dim, 20);
    auto et = oracle::random_unit_rows(b, dim, 21);
    auto e2 = oracle::random_unit_rows(b, dim, 22);
    std::vector<bool> composed{true, false, false, true, false, true, false, false};
    LossConfig cfg;
    const auto base = total_loss(e3, et, e2, composed, cfg);
    for (int i = 0; i < b; ++i) {
        if (!composed[static_cast<std::size_t>(i)]) continue;
        CHECK(base.grad_3d_img.row(i).norm() == 0.0);
        for (int j = 0; j < dim; ++j) {
            for (double d : {1e-5, -1e-5}) {
                auto x = e3;
                x(i, j) += d;
                auto y = e2;
                y(i, j) += 0.3;  // junk in a masked 2D row is ignored too
                const auto p = total_loss(x, et, y, composed, cfg);
                CHECK(p.img3d == base.img3d);
                CHECK((p.grad_3d_img - base.grad_3d_img).norm() == 0.0);
            }
        }
    }
}

TEST_CASE("total loss gradient matches finite differences") {
    const int b = 5, dim = 8;
    auto e3 = oracle::random_unit_rows(b, dim, 30);
    auto et = oracle::random_unit_rows(b, dim, 31);
    auto e2 = oracle::random_unit_rows(b, dim, 32);
    std::vector<bool> composed{false, true, false, false, true};
    LossConfig cfg;
    cfg.alpha = 0.25;
    const auto r = total_loss(e3, et, e2, composed, cfg);
    double worst = 0.0;
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < dim; ++j) {
            auto f = [&](double d) {
                auto x = e3;
                x(i, j) += d;
                return total_loss(x, et, e2, composed, cfg).total;
            };
            worst = std::max(worst, oracle::rel_err(r.grad_3d(i, j), oracle::central_diff(f, 1e-5)));
        }
    CHECK(worst < 1e-4);
    auto ft = [&](double d) {
        auto c = cfg;
        c.log_tau += d;
        return total_loss(e3, et, e2, composed, c).total;
    };
    CHECK(oracle::rel_err(r.grad_log_tau, oracle::central_diff(ft, 1e-5)) < 1e-4);
}

TEST_CASE("total loss is invariant to batch order") {
    const int b = 7, dim = 8;
    auto e3 = oracle::random_unit_rows(b, dim, 40);
    auto et = oracle::random_unit_rows(b, dim, 41);
    auto e2 = oracle::random_unit_rows(b, dim, 42);
    std::vector<bool> composed{false, true, false, true, false, false, true};
    LossConfig cfg;
    const double base = total_loss(e3, et, e2, composed, cfg).total;
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        auto perm = iota_n(b);
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::MatrixXd p3(b, dim), pt(b, dim), p2(b, dim);
        std::vector<bool> pc(b);
        for (int i = 0; i < b; ++i) {
            p3.row(i) = e3.row(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
            pt.row(i) = et.row(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
            p2.row(i) = e2.row(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
            pc[static_cast<std::size_t>(i)] = composed[perm[static_cast<std::size_t>(i)]];
        }
        CHECK(total_loss(p3, pt, p2, pc, cfg).total == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("temperature clamp") {
    CHECK(std::exp(clamp_log_tau(std::log(0.001))) == doctest::Approx(0.01));
    CHECK(std::exp(clamp_log_tau(std::log(5.0))) == doctest::Approx(1.0));
    CHECK(clamp_log_tau(std::log(0.2)) == std::log(0.2));
}

TEST_CASE("toy encoder output is unit norm and permutation invariant") {
    ToyPointEncoder enc(32, 16, 7);
    auto c = blob(300, 1);
    auto e = enc.encode(c);
    CHECK(e.size() == 16);
    CHECK(e.norm() == doctest::Approx(1.0).epsilon(1e-12));
    Rng rng(2);
    for (int t = 0; t < 5; ++t) {
        auto shuffled = c;
        std::shuffle(shuffled.points.begin(), shuffled.points.end(), rng);
        CHECK((enc.encode(shuffled) - e).norm() < 1e-6);
    }
}

TEST_CASE("toy encoder backward matches finite differences") {
    ToyPointEncoder enc(12, 6, 9);
    auto c = blob(40, 4);
    Eigen::VectorXd g = oracle::random_unit_rows(1, 6, 5).row(0).transpose();
    ToyPointEncoder::Cache cache;
    enc.forward(c, cache);
    auto grads = enc.zero_grads();
    enc.backward(c, cache, g, grads);
    double worst = 0.0;
    for (std::size_t t = 0; t < enc.params().size(); ++t) {
        auto& m = enc.params()[t].value;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                const double keep = m(i, j);
                auto f = [&](double d) {
                    m(i, j) = keep + d;
                    const double v = g.dot(enc.encode(c));
                    m(i, j) = keep;
                    return v;
                };
                worst = std::max(worst, oracle::rel_err(grads[t].value(i, j), oracle::central_diff(f, 1e-6), 1e-5));
            }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("frozen encoders are deterministic and seed dependent") {
    FrozenTextEncoder a(32, 5), b(32, 5), c(32, 6);
    CHECK(a.encode("a tall cone") == b.encode("a tall cone"));
    CHECK(a.checksum() == b.checksum());
    CHECK(a.checksum() != c.checksum());
    CHECK(a.encode("a tall cone").norm() == doctest::Approx(1.0));
    CHECK(a.encode("A TALL cone.") == a.encode("a tall cone"));
    CHECK(cosine(a.encode("a tall cone"), a.encode("a flat torus")) < 0.9);

    FrozenImageSurrogate i1(16, 5), i2(16, 5);
    auto cloud = blob(200, 6);
    CHECK(i1.encode(cloud) == i2.encode(cloud));
    CHECK(i1.encode(cloud).norm() == doctest::Approx(1.0));
    const auto occ = FrozenImageSurrogate::occupancy(cloud);
    CHECK(occ.size() == 512);
    CHECK(occ.sum() >= 1.0);
}

TEST_CASE("checkpoint round trip") {
    ToyModel m{ToyPointEncoder(8, 4, 3), std::log(0.05), 1234};
    const auto bytes = encode_checkpoint(m);
    CHECK(bytes.substr(0, 8) == "SFCKPT01");
    auto back = decode_checkpoint(bytes);
    CHECK(back.log_tau == m.log_tau);
    CHECK(back.frozen_seed == 1234);
    CHECK(checksum(back.encoder.params()) == checksum(m.encoder.params()));
    auto path = std::filesystem::temp_directory_path() / "sceneforge_test.ckpt";
    save_checkpoint(path, m);
    CHECK(encode_checkpoint(load_checkpoint(path)) == bytes);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(decode_checkpoint("NOTACKPT"), Error);
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), Error);
}

TEST_CASE("trainer: lr zero leaves parameters untouched, one step is -lr*grad") {
    FrozenEncoders frozen(8, 77);
    TrainConfig cfg;
    cfg.hidden = 8;
    cfg.dim = 8;
    cfg.lr = 0.0;
    Batch batch;
    for (std::size_t i = 0; i < 4; ++i) {
        Sample s;
        s.cloud = blob(50, i);
        s.caption = "object " + std::to_string(i);
        s.surrogate_2d = frozen.image.encode(s.cloud);
        batch.samples.push_back(std::move(s));
    }
    Trainer still(cfg, 0.5, frozen);
    const auto before = checksum(still.model().encoder.params());
    const auto frozen_before = frozen.checksum();
    for (int i = 0; i < 3; ++i) still.step(batch);
    CHECK(checksum(still.model().encoder.params()) == before);
    CHECK(frozen.checksum() == frozen_before);

    cfg.lr = 0.1;
    Trainer t(cfg, 0.5, frozen);
    const auto p0 = t.model().encoder.params();
    const double tau0 = t.model().log_tau;
    auto res = t.step(batch);
    for (std::size_t k = 0; k < p0.size(); ++k)
        CHECK((t.model().encoder.params()[k].value - (p0[k].value - 0.1 * res.grads[k].value)).norm() < 1e-12);
    CHECK(t.model().log_tau == doctest::Approx(clamp_log_tau(tau0 - 0.1 * res.loss.grad_log_tau)));

    // a composed sample carrying a surrogate is rejected
    batch.samples[0].composed = true;
    CHECK_THROWS_AS(t.step(batch), Error);
}

TEST_CASE("in-batch top-1") {
    auto a = oracle::random_unit_rows(5, 8, 1);
    CHECK(in_batch_top1(a, a) == 1.0);
    Eigen::MatrixXd sim = a * a.transpose();
    CHECK(oracle::topk(sim, 1) == 1.0);
}

}  // TEST_SUITE
