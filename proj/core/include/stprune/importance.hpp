// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "stprune/similarity.hpp"
#include "stprune/token_set.hpp"

namespace stprune {

inline constexpr double kDefaultEpsilon = 1e-6;

/// Per-token scores at each stage: raw attention, min-max normalized base
/// importance in [0, 1), and the history re-weighted importance.
struct ImportanceVector {
    std::vector<double> raw;
    std::vector<double> base;
    std::optional<std::vector<double>> final;
};

/// raw[i] = cosine(cls, features[i]); base and final left empty.
ImportanceVector cls_attention(const TokenSet& tokens, ZeroNormPolicy policy = ZeroNormPolicy::neutral);

/// (raw[i] - min) / (max - min + epsilon). Throws Error(invalid_argument)
/// for empty input or a non-positive epsilon.
std::vector<double> normalize_importance(std::span<const double> raw, double epsilon = kDefaultEpsilon);

/// Raw attention for a frame: the dump-supplied vector when present, the CLS
/// cosine otherwise. Returns raw and base filled.
ImportanceVector frame_importance(const TokenSet& tokens, double epsilon = kDefaultEpsilon);

}  // namespace stprune
