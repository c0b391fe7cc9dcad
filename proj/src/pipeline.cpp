// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/pipeline.hpp"

#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

namespace sceneforge {

namespace {

struct Shared {
    std::mutex mu;
    std::condition_variable cv;
    std::size_t next_claim = 0;
    std::size_t next_deliver = 0;
    bool stop = false;
    std::map<std::size_t, Batch> ready;
    std::optional<std::size_t> failed_index;
    std::string failure;
    PipelineStats stats;

    void sample_occupancy() {
        stats.occupancy.push_back(ready.size());
        stats.max_occupancy = std::max(stats.max_occupancy, ready.size());
    }
};

}  // namespace

PipelineStats run_pipeline(const BatchProducer& produce, std::size_t num_batches, std::size_t workers,
                           std::size_t depth, const BatchConsumer& consume) {
    if (workers < 1 || depth < 1) throw Error(ErrorCode::InvalidArgument, "workers and depth must be >= 1");
    Shared sh;
    sh.stats.assembly_ms.assign(num_batches, 0.0);

    auto worker = [&] {
        for (;;) {
            std::size_t idx;
            {
                std::unique_lock lk(sh.mu);
                sh.cv.wait(lk, [&] {
                    return sh.stop || sh.next_claim >= num_batches || sh.next_claim < sh.next_deliver + depth;
                });
                if (sh.stop || sh.next_claim >= num_batches) return;
                idx = sh.next_claim++;
            }
            const auto t0 = std::chrono::steady_clock::now();
            try {
                Batch b = produce(idx);
                b.index = idx;
                const double ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                std::lock_guard lk(sh.mu);
                sh.stats.assembly_ms[idx] = ms;
                sh.ready.emplace(idx, std::move(b));
                sh.sample_occupancy();
            } catch (const std::exception& e) {
                std::lock_guard lk(sh.mu);
                if (!sh.failed_index || idx < *sh.failed_index) {
                    sh.failed_index = idx;
                    sh.failure = e.what();
                }
                sh.stop = true;
            }
            sh.cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);

    auto shutdown = [&] {
        {
            std::lock_guard lk(sh.mu);
            sh.stop = true;
        }
        sh.cv.notify_all();
        for (auto& t : pool) t.join();
        pool.clear();
    };

    try {
        while (sh.next_deliver < num_batches) {
            Batch b;
            {
                std::unique_lock lk(sh.mu);
                sh.cv.wait(lk, [&] { return sh.failed_index.has_value() || sh.ready.count(sh.next_deliver) > 0; });
                auto it = sh.ready.find(sh.next_deliver);
                if (it == sh.ready.end()) break;  // a producer failed first
                b = std::move(it->second);
                sh.ready.erase(it);
                sh.sample_occupancy();
                // the window slides on take, so batch t + M builds while t is consumed
                ++sh.next_deliver;
            }
            sh.cv.notify_all();
            const bool more = consume(std::move(b));
            {
                std::lock_guard lk(sh.mu);
                ++sh.stats.delivered;
            }
            if (!more) {
                sh.stats.stopped_early = sh.stats.delivered < num_batches;
                break;
            }
        }
    } catch (...) {
        shutdown();
        throw;
    }
    shutdown();
    if (sh.failed_index && sh.stats.delivered <= *sh.failed_index && !sh.stats.stopped_early)
        throw PipelineError(*sh.failed_index, sh.failure);
    return std::move(sh.stats);
}

PipelineStats run_pipeline(const BatchConfig& cfg, const BatchSource& source, const SceneForge& forge,
                           std::size_t num_batches, const BatchConsumer& consume) {
    cfg.validate();
    auto produce = [&](std::size_t idx) { return assemble_batch(idx, cfg, source, forge); };
    return run_pipeline(produce, num_batches, cfg.workers, cfg.prefetch_depth, consume);
}

}  // namespace sceneforge
