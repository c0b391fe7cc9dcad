// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/common.hpp"

namespace sceneforge {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
        case ErrorCode::MissingCaptions: return "MissingCaptions";
        case ErrorCode::MalformedJsonl: return "MalformedJsonl";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::MissingCloud: return "MissingCloud";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::UnsupportedPly: return "UnsupportedPly";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyCaption: return "EmptyCaption";
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::DatasetTooSmall: return "DatasetTooSmall";
        case ErrorCode::HttpError: return "HttpError";
        case ErrorCode::EmptyResponse: return "EmptyResponse";
        case ErrorCode::InconsistentConfig: return "InconsistentConfig";
        case ErrorCode::UnnormalizedEmbedding: return "UnnormalizedEmbedding";
        case ErrorCode::Config: return "Config";
        case ErrorCode::NonFiniteScore: return "NonFiniteScore";
        case ErrorCode::Divergence: return "Divergence";
        case ErrorCode::Pipeline: return "Pipeline";
    }
    return "Unknown";
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x51ed270b27a5c2f1ULL;
    for (auto p : parts) h = mix64(h ^ mix64(p));
    return h;
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t basis) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = basis;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace sceneforge
