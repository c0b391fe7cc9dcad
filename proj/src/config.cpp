// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace sceneforge {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw Error(ErrorCode::Config, "config line " + std::to_string(line) + ": " + msg);
}

bool is_bare(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

struct Cursor {
    const std::string& s;
    std::size_t i = 0;
    int line;

    void skip_ws() {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
    bool done() {
        skip_ws();
        return i >= s.size() || s[i] == '#';
    }
};

std::string parse_string(Cursor& c) {
    ++c.i;  // opening quote
    std::string out;
    while (c.i < c.s.size() && c.s[c.i] != '"') {
        char ch = c.s[c.i++];
        if (ch == '\\') {
            if (c.i >= c.s.size()) break;
            const char e = c.s[c.i++];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(c.line, std::string("unsupported escape \\") + e);
            }
        } else {
            out += ch;
        }
    }
    if (c.i >= c.s.size()) fail(c.line, "unterminated string");
    ++c.i;
    return out;
}

ConfigScalar parse_scalar(Cursor& c) {
    c.skip_ws();
    if (c.i >= c.s.size()) fail(c.line, "missing value");
    if (c.s[c.i] == '"') return parse_string(c);
    std::size_t j = c.i;
    while (j < c.s.size() && c.s[j] != ',' && c.s[j] != ']' && c.s[j] != '#' && c.s[j] != ' ' && c.s[j] != '\t') ++j;
    std::string tok = c.s.substr(c.i, j - c.i);
    c.i = j;
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string clean;
    for (char ch : tok) {
        if (ch != '_') clean += ch;
    }
    const bool floaty = clean.find_first_of(".eE") != std::string::npos || clean == "inf" || clean == "nan";
    if (!floaty) {
        std::int64_t v;
        const char* b = clean.data() + (clean.size() > 0 && clean[0] == '+' ? 1 : 0);
        auto [p, ec] = std::from_chars(b, clean.data() + clean.size(), v);
        if (ec == std::errc() && p == clean.data() + clean.size()) return v;
    } else {
        try {
            std::size_t used = 0;
            const double v = std::stod(clean, &used);
            if (used == clean.size()) return v;
        } catch (const std::exception&) {
        }
    }
    fail(c.line, "cannot parse value '" + tok + "'");
}

}  // namespace

ConfigTable parse_config_text(const std::string& text) {
    ConfigTable table;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        Cursor c{raw, 0, line};
        if (c.done()) continue;
        if (raw[c.i] == '[') {
            const auto close = raw.find(']', c.i);
            if (close == std::string::npos) fail(line, "unterminated section header");
            section = trim(raw.substr(c.i + 1, close - c.i - 1));
            if (section.empty()) fail(line, "empty section name");
            for (char ch : section) {
                if (!is_bare(ch) && ch != '.') fail(line, "bad section name '" + section + "'");
            }
            c.i = close + 1;
            if (!c.done()) fail(line, "trailing text after section header");
            continue;
        }
        std::size_t j = c.i;
        while (j < raw.size() && is_bare(raw[j])) ++j;
        const std::string key = raw.substr(c.i, j - c.i);
        if (key.empty()) fail(line, "expected a key");
        c.i = j;
        c.skip_ws();
        if (c.i >= raw.size() || raw[c.i] != '=') fail(line, "expected '=' after '" + key + "'");
        ++c.i;
        c.skip_ws();

        ConfigValue v;
        v.line = line;
        if (c.i < raw.size() && raw[c.i] == '[') {
            ++c.i;
            std::vector<ConfigScalar> items;
            for (;;) {
                c.skip_ws();
                if (c.i < raw.size() && raw[c.i] == ']') {
                    ++c.i;
                    break;
                }
                items.push_back(parse_scalar(c));
                c.skip_ws();
                if (c.i < raw.size() && raw[c.i] == ',') ++c.i;
                else if (c.i >= raw.size() || raw[c.i] != ']') fail(line, "malformed array");
            }
            v.value = std::move(items);
        } else {
            std::visit([&](auto&& x) { v.value = x; }, parse_scalar(c));
        }
        if (!c.done()) fail(line, "trailing text after value");
        const std::string path = section.empty() ? key : section + "." + key;
        if (table.count(path)) fail(line, "duplicate key '" + path + "'");
        table.emplace(path, std::move(v));
    }
    return table;
}

namespace {

double as_double(const ConfigValue& v, const std::string& key) {
    if (auto d = std::get_if<double>(&v.value)) return *d;
    if (auto i = std::get_if<std::int64_t>(&v.value)) return static_cast<double>(*i);
    fail(v.line, "'" + key + "' expects a number");
}

std::int64_t as_int(const ConfigValue& v, const std::string& key) {
    if (auto i = std::get_if<std::int64_t>(&v.value)) return *i;
    fail(v.line, "'" + key + "' expects an integer");
}

std::size_t as_count(const ConfigValue& v, const std::string& key) {
    const auto i = as_int(v, key);
    if (i < 0) fail(v.line, "'" + key + "' must be non-negative");
    return static_cast<std::size_t>(i);
}

bool as_bool(const ConfigValue& v, const std::string& key) {
    if (auto b = std::get_if<bool>(&v.value)) return *b;
    fail(v.line, "'" + key + "' expects true or false");
}

std::string as_string(const ConfigValue& v, const std::string& key) {
    if (auto s = std::get_if<std::string>(&v.value)) return *s;
    fail(v.line, "'" + key + "' expects a string");
}

using Setter = std::function<void(AppConfig&, const ConfigValue&, const std::string&)>;

void bind_policy(std::map<std::string, Setter>& m, const std::string& prefix, AugmentPolicy AugmentPolicies::*which) {
    m[prefix + ".dropout_rate"] = [which](AppConfig& c, const ConfigValue& v, const std::string& k) {
        (c.augment.*which).dropout_rate = as_double(v, k);
    };
    m[prefix + ".scale_low"] = [which](AppConfig& c, const ConfigValue& v, const std::string& k) {
        (c.augment.*which).scale_low = as_double(v, k);
    };
    m[prefix + ".scale_high"] = [which](AppConfig& c, const ConfigValue& v, const std::string& k) {
        (c.augment.*which).scale_high = as_double(v, k);
    };
    m[prefix + ".yaw_range"] = [which](AppConfig& c, const ConfigValue& v, const std::string& k) {
        (c.augment.*which).yaw_range = as_double(v, k);
    };
    m[prefix + ".tilt_range"] = [which](AppConfig& c, const ConfigValue& v, const std::string& k) {
        (c.augment.*which).tilt_range = as_double(v, k);
    };
    m[prefix + ".shift_range"] = [which](AppConfig& c, const ConfigValue& v, const std::string& k) {
        (c.augment.*which).shift_range = as_double(v, k);
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = [] {
        std::map<std::string, Setter> s;
#define SF_SET(key, expr) s[key] = [](AppConfig & c, const ConfigValue & v, const std::string & k) { expr; }
        SF_SET("dataset_root", c.dataset_root = as_string(v, k));
        SF_SET("output_dir", c.output_dir = as_string(v, k));
        SF_SET("log_level", c.log_level = as_string(v, k));

        bind_policy(s, "augment.single", &AugmentPolicies::single);
        bind_policy(s, "augment.precompose", &AugmentPolicies::precompose);
        bind_policy(s, "augment.final", &AugmentPolicies::final_scene);

        SF_SET("placement.delta", c.placement.delta = as_double(v, k));
        SF_SET("placement.noise_sigma", c.placement.noise_sigma = as_double(v, k));

        SF_SET("refiner.endpoint_url", c.refiner.endpoint_url = as_string(v, k));
        SF_SET("refiner.model_name", c.refiner.model_name = as_string(v, k));
        SF_SET("refiner.api_key_env", c.refiner.api_key_env = as_string(v, k));
        SF_SET("refiner.timeout_ms", c.refiner.timeout = std::chrono::milliseconds(as_int(v, k)));
        SF_SET("refiner.max_retries", c.refiner.max_retries = static_cast<int>(as_int(v, k)));
        SF_SET("refiner.temperature", c.refiner.temperature = as_double(v, k));
        SF_SET("refiner.offline_fallback", c.refiner.offline_fallback = as_bool(v, k));
        SF_SET("refiner.validate", c.refiner.validate = as_bool(v, k));
        SF_SET("refiner.prompt_path", c.refiner.prompt_path = as_string(v, k));
        SF_SET("refiner.max_in_flight", c.refiner.max_in_flight = static_cast<int>(as_int(v, k)));
        SF_SET("refiner.backoff_base_ms", c.refiner.backoff_base = std::chrono::milliseconds(as_int(v, k)));

        SF_SET("batch.batch_size", c.batch.batch_size = as_count(v, k));
        SF_SET("batch.alpha", c.batch.alpha = as_double(v, k));
        SF_SET("batch.max_objects", c.batch.max_objects = as_count(v, k));
        SF_SET("batch.target_points", c.batch.target_points = as_count(v, k));
        SF_SET("batch.prefetch_depth", c.batch.prefetch_depth = as_count(v, k));
        SF_SET("batch.workers", c.batch.workers = as_count(v, k));
        SF_SET("batch.seed", c.batch.global_seed = static_cast<std::uint64_t>(as_int(v, k)));
        SF_SET("batch.subsample_method", c.subsample_method = parse_subsample_method(as_string(v, k)));
        SF_SET("batch.k_distribution", c.k_distribution = as_string(v, k));

        SF_SET("loss.dynamic_budget", c.loss.dynamic_budget = as_bool(v, k));

        SF_SET("train.epochs", c.train.epochs = as_count(v, k));
        SF_SET("train.lr", c.train.lr = as_double(v, k));
        SF_SET("train.momentum", c.train.momentum = as_double(v, k));
        SF_SET("train.batches_per_epoch", c.train.batches_per_epoch = as_count(v, k));
        SF_SET("train.hidden", c.train.hidden = static_cast<int>(as_int(v, k)));
        SF_SET("train.dim", c.train.dim = static_cast<int>(as_int(v, k)));
        SF_SET("train.frozen_seed", c.train.frozen_seed = static_cast<std::uint64_t>(as_int(v, k)));
        SF_SET("train.init_seed", c.train.init_seed = static_cast<std::uint64_t>(as_int(v, k)));
        SF_SET("train.learn_tau", c.train.learn_tau = as_bool(v, k));

        SF_SET("eval.target_points", c.eval_target_points = as_count(v, k));
        SF_SET("eval.seed", c.eval_seed = static_cast<std::uint64_t>(as_int(v, k)));
        SF_SET("eval.min_overlap", c.predicate.min_overlap = as_double(v, k));

        SF_SET("reposition.method", c.reposition.method = parse_reposition_method(as_string(v, k)));
        SF_SET("reposition.steps", c.reposition.steps = as_count(v, k));
        SF_SET("reposition.step_size", c.reposition.step_size = as_double(v, k));

        SF_SET("baselines.mixup_matching", c.mixup_matching = parse_mixup_matching(as_string(v, k)));
        SF_SET("baselines.lambda", c.mix_lambda = as_double(v, k));
#undef SF_SET
        return s;
    }();
    return m;
}

}  // namespace

void AppConfig::validate() const {
    augment.single.validate();
    augment.precompose.validate();
    augment.final_scene.validate();
    placement.validate();
    refiner.validate_config();
    batch.validate();
    train.validate();
    if (k_distribution != "uniform")
        throw Error(ErrorCode::Config, "k_distribution '" + k_distribution + "' is not supported (only \"uniform\")");
    if (eval_target_points < 1) throw Error(ErrorCode::Config, "eval.target_points must be >= 1");
    if (mix_lambda > 1.0) throw Error(ErrorCode::Config, "baselines.lambda must be <= 1");
    if (log_level != "trace" && log_level != "debug" && log_level != "info" && log_level != "warn" &&
        log_level != "error" && log_level != "off")
        throw Error(ErrorCode::Config, "unknown log_level '" + log_level + "'");
}

AppConfig config_from_table(const ConfigTable& table, AppConfig base) {
    const auto& s = setters();
    for (const auto& [key, value] : table) {
        auto it = s.find(key);
        if (it == s.end()) fail(value.line, "unknown key '" + key + "'");
        try {
            it->second(base, value, key);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Config) throw;
            fail(value.line, e.what());
        }
    }
    base.validate();
    return base;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_table(parse_config_text(ss.str()));
}

std::string default_config_text() {
    return R"(# sceneforge configuration; every key below shows its default.
dataset_root = ""
output_dir = "out"
log_level = "info"

[augment.single]
dropout_rate = 0.1
scale_low = 0.9
scale_high = 1.1
yaw_range = 3.141592653589793
tilt_range = 0.5235987755982988
shift_range = 0.2

[augment.precompose]
dropout_rate = 0.1
scale_low = 0.9
scale_high = 1.1
yaw_range = 3.141592653589793
tilt_range = 0.08726646259971647
shift_range = 0.0

[augment.final]
dropout_rate = 0.1
scale_low = 0.9
scale_high = 1.1
yaw_range = 3.141592653589793
tilt_range = 0.08726646259971647
shift_range = 0.2

[placement]
delta = 0.05
noise_sigma = 0.01

[refiner]
endpoint_url = ""          # empty: refine offline with the rule-based fallback
model_name = "qwen2.5-7b-instruct"
api_key_env = "SCENEFORGE_API_KEY"
timeout_ms = 30000
max_retries = 3
temperature = 0.7
offline_fallback = true
validate = true
prompt_path = ""
max_in_flight = 4
backoff_base_ms = 500

[batch]
batch_size = 64
alpha = 0.5
max_objects = 3
target_points = 10000
prefetch_depth = 4
workers = 1
seed = 0
subsample_method = "uniform"   # or "fps"
k_distribution = "uniform"

[loss]
dynamic_budget = false

[train]
epochs = 30
lr = 0.05
momentum = 0.9
batches_per_epoch = 0      # 0: one pass over the dataset
hidden = 64
dim = 32
frozen_seed = 1234
init_seed = 0
learn_tau = true

[eval]
target_points = 1024
seed = 0
min_overlap = 0.25

[reposition]
method = "coordinate"      # or "gradient"
steps = 60
step_size = 0.25

[baselines]
mixup_matching = "greedy"  # or "random"
lambda = -1.0              # negative: uniform draw per sample
)";
}

}  // namespace sceneforge
