// SPDX-License-Identifier: Apache-2.0

#include "stprune/importance.hpp"

#include <algorithm>

#include "stprune/error.hpp"

namespace stprune {

ImportanceVector cls_attention(const TokenSet& tokens, ZeroNormPolicy policy) {
    tokens.validate();
    ImportanceVector out;
    out.raw.resize(tokens.size());
    dot_rows(tokens.features, tokens.cls, out.raw);
    const auto norms = row_norms(tokens.features);
    const double cls_norm = l2_norm(tokens.cls);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out.raw[i] = cosine_from_parts(out.raw[i], norms[i], cls_norm, policy);
    }
    return out;
}

std::vector<double> normalize_importance(std::span<const double> raw, double epsilon) {
    if (raw.empty()) {
        throw Error(ErrorCode::invalid_argument, "cannot normalize an empty attention vector");
    }
    if (!(epsilon > 0.0)) {
        throw Error(ErrorCode::domain_error, "epsilon must be positive");
    }
    const auto [lo, hi] = std::ranges::minmax_element(raw);
    const double min_value = *lo;
    const double denom = (*hi - min_value) + epsilon;
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out[i] = (raw[i] - min_value) / denom;
    }
    return out;
}

ImportanceVector frame_importance(const TokenSet& tokens, double epsilon) {
    ImportanceVector out;
    if (tokens.attention) {
        tokens.validate();
        out.raw.assign(tokens.attention->begin(), tokens.attention->end());
    } else {
        out = cls_attention(tokens);
    }
    out.base = normalize_importance(out.raw, epsilon);
    return out;
}

}  // namespace stprune
