// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "stprune/matrix.hpp"

namespace stprune {

/// Share of total base importance held by the retained tokens. Sums run in
/// ascending token order so equal index sets give equal values. 0 when the
/// total is 0.
double importance_mass(std::span<const double> base, std::span<const std::size_t> retained);

/// Mean, over dropped tokens, of the best cosine to any retained token.
/// 1 when nothing is dropped.
double coverage(const Matrix& features, std::span<const std::size_t> retained);

}  // namespace stprune
