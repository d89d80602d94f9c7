// SPDX-License-Identifier: Apache-2.0

#include "stprune/quality.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "stprune/error.hpp"
#include "stprune/similarity.hpp"

namespace stprune {

namespace {

std::vector<char> membership(std::size_t n, std::span<const std::size_t> retained) {
    std::vector<char> kept(n, 0);
    for (auto i : retained) {
        if (i >= n) {
            throw Error(ErrorCode::invalid_argument, "retained index out of range");
        }
        kept[i] = 1;
    }
    return kept;
}

}  // namespace

double importance_mass(std::span<const double> base, std::span<const std::size_t> retained) {
    const auto kept = membership(base.size(), retained);
    double total = 0.0;
    double held = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        total += base[i];
        if (kept[i]) {
            held += base[i];
        }
    }
    return total == 0.0 ? 0.0 : held / total;
}

double coverage(const Matrix& features, std::span<const std::size_t> retained) {
    const std::size_t n = features.rows();
    const auto kept = membership(n, retained);
    const auto dropped = static_cast<std::size_t>(std::ranges::count(kept, 0));
    if (dropped == 0) {
        return 1.0;
    }
    if (retained.empty()) {
        throw Error(ErrorCode::empty_selection, "coverage needs at least one retained token");
    }
    const SimilarityKernel kernel(features);
    std::vector<double> best(n, -std::numeric_limits<double>::infinity());
    std::vector<double> column(n);
    for (auto j : retained) {
        kernel.similarity_to_row(j, column);
        for (std::size_t i = 0; i < n; ++i) {
            best[i] = std::max(best[i], column[i]);
        }
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!kept[i]) {
            sum += best[i];
        }
    }
    return sum / static_cast<double>(dropped);
}

}  // namespace stprune
