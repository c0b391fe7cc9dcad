// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/caption_forge.hpp"

#include <algorithm>
#include <cctype>
#include <string_view>
#include <unordered_set>

namespace sceneforge {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n\f\v");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> word_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

namespace {

std::string strip_trailing_periods(std::string s) {
    while (!s.empty() && (s.back() == '.' || std::isspace(static_cast<unsigned char>(s.back())))) s.pop_back();
    return s;
}

}  // namespace

std::string join_parts(std::span<const CaptionPart> parts) {
    std::string text;
    for (const auto& p : parts) {
        if (!text.empty()) text += ' ' + p.phrase + ' ';
        text += p.caption;
    }
    return text;
}

RawCaption compose_raw(std::span<const std::string> captions, std::span<const Relation> relations) {
    if (captions.size() < 2 || relations.size() + 1 != captions.size())
        throw Error(ErrorCode::LengthMismatch, "compose_raw needs K >= 2 captions and K-1 relations, got " +
                                                   std::to_string(captions.size()) + " and " +
                                                   std::to_string(relations.size()));
    RawCaption raw;
    for (std::size_t i = 0; i < captions.size(); ++i) {
        std::string c = trim(captions[i]);
        if (i + 1 < captions.size()) c = strip_trailing_periods(c);
        if (c.empty()) throw Error(ErrorCode::EmptyCaption, "caption " + std::to_string(i) + " is empty");
        raw.parts.push_back({std::move(c), i == 0 ? std::string{} : std::string(phrase(relations[i - 1]))});
    }
    raw.text = join_parts(raw.parts);
    return raw;
}

std::string rule_refine(const std::string& text) {
    std::string collapsed;
    bool pending_space = false;
    for (unsigned char c : trim(text)) {
        if (std::isspace(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !(c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?'))
            collapsed.push_back(' ');
        pending_space = false;
        collapsed.push_back(static_cast<char>(c));
    }
    if (collapsed.empty()) return collapsed;
    auto first = std::find_if(collapsed.begin(), collapsed.end(), [](unsigned char c) { return std::isalpha(c); });
    if (first != collapsed.end()) *first = static_cast<char>(std::toupper(static_cast<unsigned char>(*first)));
    // any trailing punctuation run becomes a single period
    while (!collapsed.empty() && std::string_view(",;:!?.").find(collapsed.back()) != std::string_view::npos)
        collapsed.pop_back();
    if (collapsed.empty()) return collapsed;
    collapsed.push_back('.');
    return collapsed;
}

std::string rule_refine(const RawCaption& raw) { return rule_refine(raw.text); }

namespace {

bool contains_sequence(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
    if (needle.empty()) return true;
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

bool validate_refined(const std::string& refined, const RawCaption& raw) {
    const auto tokens = word_tokens(refined);
    if (tokens.empty()) return false;
    for (const auto& part : raw.parts) {
        if (!contains_sequence(tokens, word_tokens(part.phrase))) return false;
    }
    const std::unordered_set<std::string> vocab(tokens.begin(), tokens.end());
    for (const auto& part : raw.parts) {
        bool has_content = false;
        bool kept = false;
        for (const auto& w : word_tokens(part.caption)) {
            if (w.size() < 4) continue;
            has_content = true;
            if (vocab.count(w)) {
                kept = true;
                break;
            }
        }
        if (has_content && !kept) return false;
    }
    return true;
}

}  // namespace sceneforge
