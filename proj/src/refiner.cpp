// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/refiner.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "json.hpp"

namespace sceneforge {

namespace {

constexpr const char* kPromptV1 =
    "You rewrite short scene descriptions that were assembled mechanically from object captions joined by "
    "spatial phrases.\n"
    "\n"
    "Rules:\n"
    "- Keep every object that is mentioned, together with its attributes.\n"
    "- Keep every spatial phrase (\"over\", \"under\", \"next to\") word for word, and keep the objects it "
    "connects in the same roles.\n"
    "- Fix grammar, capitalization and punctuation so the text reads naturally.\n"
    "- When the description is long, split it into several short sentences.\n"
    "- Do not invent objects, attributes or relations that are not in the input.\n"
    "\n"
    "Reply with the rewritten description only, as a single paragraph.\n";

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw Error(ErrorCode::Config, "refiner.endpoint_url is not an http(s) URL: " + url);
    return {m[1].str(), m[2].matched ? m[2].str() : std::string("/v1/chat/completions")};
}

std::string single_paragraph(const std::string& text) {
    std::string out;
    bool space = false;
    for (char c : trim(text)) {
        if (c == '\n' || c == '\r' || c == '\t' || c == ' ') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

const char* to_string(RefineSource s) {
    switch (s) {
        case RefineSource::Model: return "model";
        case RefineSource::RuleFallback: return "rule_fallback";
        case RefineSource::RawFallback: return "raw_fallback";
        case RefineSource::Offline: return "offline";
    }
    return "unknown";
}

const std::string& default_refiner_prompt() {
    static const std::string prompt(kPromptV1);
    return prompt;
}

void RefinerConfig::validate_config() const {
    if (max_retries < 0) throw Error(ErrorCode::Config, "refiner.max_retries must be >= 0");
    if (timeout.count() <= 0) throw Error(ErrorCode::Config, "refiner.timeout must be > 0");
    if (temperature < 0.0) throw Error(ErrorCode::Config, "refiner.temperature must be >= 0");
    if (max_in_flight < 1 || max_in_flight > 1024) throw Error(ErrorCode::Config, "refiner.max_in_flight must be in [1, 1024]");
    if (backoff_base.count() < 0) throw Error(ErrorCode::Config, "refiner.backoff_base must be >= 0");
    if (!endpoint_url.empty()) split_url(endpoint_url);
}

CaptionRefiner::CaptionRefiner(RefinerConfig cfg)
    : cfg_(std::move(cfg)), prompt_(default_refiner_prompt()), prompt_hash_(0), in_flight_(1) {
    cfg_.validate_config();
    if (!cfg_.prompt_path.empty()) {
        std::ifstream in(cfg_.prompt_path);
        if (!in) throw Error(ErrorCode::Config, "cannot read refiner.prompt_path " + cfg_.prompt_path);
        // leading '#' lines (license, notes) and one blank line after them are not part of the prompt
        std::string line, text;
        bool skipped = false;
        while (std::getline(in, line) && !line.empty() && line[0] == '#') skipped = true;
        if (in && !(skipped && line.empty())) text = line + '\n';
        while (std::getline(in, line)) text += line + '\n';
        prompt_ = text;
    }
    prompt_hash_ = fnv1a(prompt_);
    // the semaphore starts with one permit; top it up to the configured bound
    in_flight_.release(cfg_.max_in_flight - 1);
}

CaptionRefiner::~CaptionRefiner() = default;

std::size_t CaptionRefiner::requests_sent() const {
    std::lock_guard lock(mu_);
    return requests_;
}

std::string CaptionRefiner::request_completion(const std::string& raw_text) {
    const Endpoint ep = split_url(cfg_.endpoint_url);
    httplib::Client client(ep.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    const nlohmann::json body = {
        {"model", cfg_.model_name},
        {"messages", nlohmann::json::array({{{"role", "system"}, {"content", prompt_}},
                                            {{"role", "user"}, {"content", raw_text}}})},
        {"temperature", cfg_.temperature},
    };
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(cfg_.backoff_base * (1LL << (attempt - 1)));
        {
            std::lock_guard lock(mu_);
            ++requests_;
        }
        auto res = client.Post(ep.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) {
            nlohmann::json reply;
            try {
                reply = nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::parse_error& e) {
                throw Error(ErrorCode::HttpError, std::string("unparseable completion body: ") + e.what());
            }
            std::string content;
            if (reply.contains("choices") && reply["choices"].is_array() && !reply["choices"].empty()) {
                const auto& choice = reply["choices"][0];
                if (choice.contains("message") && choice["message"].contains("content") &&
                    choice["message"]["content"].is_string())
                    content = choice["message"]["content"].get<std::string>();
            }
            content = single_paragraph(content);
            if (content.empty()) throw Error(ErrorCode::EmptyResponse, "model returned an empty completion");
            return content;
        }
        last_error = "HTTP " + std::to_string(res->status);
        if (!retryable(res->status)) break;
    }
    throw Error(ErrorCode::HttpError, "refiner request failed: " + last_error);
}

RefineOutcome CaptionRefiner::refine(const RawCaption& raw) {
    if (cfg_.endpoint_url.empty()) return {rule_refine(raw), RefineSource::Offline, {}};

    const auto key = std::make_pair(prompt_hash_, raw.text);
    {
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }

    RefineOutcome outcome;
    try {
        std::string text;
        {
            in_flight_.acquire();
            struct Permit {
                std::counting_semaphore<1024>& sem;
                ~Permit() { sem.release(); }
            } permit{in_flight_};
            text = request_completion(raw.text);
        }
        if (cfg_.validate && !validate_refined(text, raw)) {
            outcome = {raw.text, RefineSource::RawFallback,
                       "refined caption dropped a relation phrase or object word; keeping raw text"};
            spdlog::warn("{} (raw: '{}', model: '{}')", outcome.warning, raw.text, text);
        } else {
            outcome = {text, RefineSource::Model, {}};
        }
    } catch (const Error& e) {
        if (!cfg_.offline_fallback) throw;
        // not cached, so a later call retries the endpoint
        spdlog::warn("caption refiner unavailable, using rule-based rewrite: {}", e.what());
        return {rule_refine(raw), RefineSource::RuleFallback, e.what()};
    }

    std::lock_guard lock(mu_);
    cache_.emplace(key, outcome);
    return outcome;
}

std::string refine(const RawCaption& raw, const RefinerConfig& cfg) {
    CaptionRefiner refiner(cfg);
    return refiner.refine(raw).text;
}

}  // namespace sceneforge
