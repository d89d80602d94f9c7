// SPDX-License-Identifier: Apache-2.0

#include "stprune/token_set.hpp"

#include <algorithm>
#include <cmath>

#include "stprune/error.hpp"

namespace stprune {

namespace {

bool all_finite(std::span<const float> values) {
    return std::ranges::all_of(values, [](float v) { return std::isfinite(v); });
}

}  // namespace

void TokenSet::validate() const {
    if (features.rows() == 0 || features.cols() == 0) {
        throw Error(ErrorCode::invalid_argument, "token set needs N >= 1 and D >= 1");
    }
    if (cls.size() != features.cols()) {
        throw Error(ErrorCode::shape_mismatch, "cls length differs from feature width");
    }
    if (attention && attention->size() != features.rows()) {
        throw Error(ErrorCode::length_mismatch, "attention length differs from token count");
    }
    if (!all_finite(features.data()) || !all_finite(cls) || (attention && !all_finite(*attention))) {
        throw Error(ErrorCode::invalid_argument, "token set contains non-finite values");
    }
}

TokenSet TokenSet::from_span(std::span<const float> features, std::size_t n, std::size_t d,
                             std::span<const float> cls) {
    if (features.size() != n * d) {
        throw Error(ErrorCode::shape_mismatch, "feature buffer size does not match n*d");
    }
    TokenSet out;
    out.features = Matrix(n, d, std::vector<float>(features.begin(), features.end()));
    out.cls.assign(cls.begin(), cls.end());
    out.validate();
    return out;
}

}  // namespace stprune
