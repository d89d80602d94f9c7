// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stprune/matrix.hpp"

namespace stprune {

/// One frame worth of encoder output: N patch tokens of width D plus the
/// global CLS vector. `attention` optionally carries a precomputed raw
/// attention vector read from a dump; when absent it is derived from the
/// CLS/patch cosine.
struct TokenSet {
    Matrix features;
    std::vector<float> cls;
    std::uint64_t frame_id = 0;
    std::uint64_t timestamp = 0;
    std::optional<std::vector<float>> attention;

    std::size_t size() const noexcept { return features.rows(); }
    std::size_t dim() const noexcept { return features.cols(); }

    /// Throws Error(invalid_argument / shape_mismatch) when N or D is zero,
    /// cls or attention have the wrong length, or any value is non-finite.
    void validate() const;

    /// Copies caller-owned contiguous row-major data.
    static TokenSet from_span(std::span<const float> features, std::size_t n, std::size_t d,
                              std::span<const float> cls);

    bool operator==(const TokenSet& other) const = default;
};

}  // namespace stprune
