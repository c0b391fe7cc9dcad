// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sceneforge {

using Vec3 = Eigen::Vector3d;
using Rng = std::mt19937_64;

enum class ErrorCode {
    InvalidArgument,
    Io,
    MissingCaptions,
    MalformedJsonl,
    DuplicateId,
    MissingCloud,
    EmptyDataset,
    UnsupportedPly,
    TruncatedFile,
    NonFiniteCoordinate,
    LengthMismatch,
    EmptyCaption,
    SizeMismatch,
    InvalidSpec,
    DatasetTooSmall,
    HttpError,
    EmptyResponse,
    InconsistentConfig,
    UnnormalizedEmbedding,
    Config,
    NonFiniteScore,
    Divergence,
    Pipeline,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Order-sensitive combination of seed components, e.g.
/// derive_seed({global_seed, epoch, batch_index, sample_index}).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t basis = 0xcbf29ce484222325ULL);

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t basis = 0xcbf29ce484222325ULL) {
    return fnv1a(s.data(), s.size(), basis);
}

}  // namespace sceneforge
