// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "sceneforge/relations.hpp"

namespace sceneforge {

struct CaptionPart {
    std::string caption;  // trimmed, trailing period removed unless last
    std::string phrase;   // connective preceding this caption; empty for the first
};

/// Captions joined by their connecting phrases, before any fluency rewrite.
struct RawCaption {
    std::string text;
    std::vector<CaptionPart> parts;
};

std::string join_parts(std::span<const CaptionPart> parts);

/// "t0 <phrase(s1)> t1 <phrase(s2)> t2 ..." with whitespace trimmed and the
/// trailing periods of every caption but the last removed.
RawCaption compose_raw(std::span<const std::string> captions, std::span<const Relation> relations);

/// Deterministic offline rewrite: collapse whitespace, drop spaces before
/// punctuation, capitalize the first letter and end with a period. Idempotent.
std::string rule_refine(const RawCaption& raw);
std::string rule_refine(const std::string& text);

/// True iff every connective phrase survives (case-insensitive, whole words)
/// and each component caption keeps at least one content word (>= 4 letters).
bool validate_refined(const std::string& refined, const RawCaption& raw);

std::string trim(const std::string& s);
std::vector<std::string> word_tokens(const std::string& text);

}  // namespace sceneforge
