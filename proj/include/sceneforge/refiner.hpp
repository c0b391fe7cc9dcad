// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

#include "sceneforge/caption_forge.hpp"

namespace sceneforge {

/// Chat-completions client settings. An empty endpoint_url means "offline":
/// refine() goes straight to rule_refine without touching the network.
struct RefinerConfig {
    std::string endpoint_url;
    std::string model_name = "qwen2.5-7b-instruct";
    std::string api_key_env = "SCENEFORGE_API_KEY";
    std::chrono::milliseconds timeout{30000};
    int max_retries = 3;
    double temperature = 0.7;
    bool offline_fallback = true;
    bool validate = true;
    std::string prompt_path;  // empty: built-in prompt v1
    int max_in_flight = 4;
    std::chrono::milliseconds backoff_base{500};

    void validate_config() const;
};

enum class RefineSource { Model, RuleFallback, RawFallback, Offline };

const char* to_string(RefineSource s);

struct RefineOutcome {
    std::string text;
    RefineSource source = RefineSource::Offline;
    std::string warning;
};

/// Built-in system prompt (also shipped as assets/refiner_prompt_v1.txt).
const std::string& default_refiner_prompt();

/// Thread-safe caption refiner. Results are cached by (prompt hash, raw text)
/// and at most `max_in_flight` requests are outstanding at once.
class CaptionRefiner {
public:
    explicit CaptionRefiner(RefinerConfig cfg);
    ~CaptionRefiner();

    CaptionRefiner(const CaptionRefiner&) = delete;
    CaptionRefiner& operator=(const CaptionRefiner&) = delete;

    RefineOutcome refine(const RawCaption& raw);

    const RefinerConfig& config() const { return cfg_; }
    const std::string& prompt() const { return prompt_; }
    std::uint64_t prompt_hash() const { return prompt_hash_; }
    std::size_t requests_sent() const;

private:
    std::string request_completion(const std::string& raw_text);

    RefinerConfig cfg_;
    std::string prompt_;
    std::uint64_t prompt_hash_;
    std::counting_semaphore<1024> in_flight_;
    mutable std::mutex mu_;
    std::map<std::pair<std::uint64_t, std::string>, RefineOutcome> cache_;
    std::size_t requests_ = 0;
};

/// One-shot convenience wrapper around CaptionRefiner::refine.
std::string refine(const RawCaption& raw, const RefinerConfig& cfg);

}  // namespace sceneforge
