// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stprune/config.hpp"
#include "stprune/matrix.hpp"
#include "stprune/token_set.hpp"

namespace stprune {

/// Retained tokens in pick order. step_scores[t] is the objective value that
/// won step t (for the top-k strategies, the token's importance).
struct SelectionResult {
    std::vector<std::size_t> indices;
    std::vector<double> step_scores;
    Strategy strategy = Strategy::amm;
    std::size_t budget = 0;

    std::size_t size() const noexcept { return indices.size(); }
    bool operator==(const SelectionResult& other) const = default;
};

/// Greedy importance x distinctness selection. Each step picks the unselected
/// token maximizing base[i] * (1 - max_{j in S} cos(f_i, f_j)), with the
/// distinctness of an empty S taken as 1 and ties going to the lowest index.
/// Candidates keep a running max-similarity to S that is refreshed lazily,
/// only when a candidate reaches the top of the score heap.
SelectionResult amm_select(const Matrix& features, std::span<const double> base, std::size_t k);
SelectionResult amm_select(const TokenSet& tokens, std::span<const double> base, std::size_t k);

/// Reference for amm_select: rebuilds the whole objective from pairwise
/// cosines at every step, no caching. O(k^2 * N * D).
SelectionResult amm_oracle(const Matrix& features, std::span<const double> base, std::size_t k);
SelectionResult amm_oracle(const TokenSet& tokens, std::span<const double> base, std::size_t k);

/// amm_select with every importance fixed at 1.
SelectionResult diversity_only_select(const Matrix& features, std::size_t k);

/// The k largest importances, ordered by descending value then index.
SelectionResult semantics_only_select(std::span<const double> base, std::size_t k);

/// Same ranking as semantics_only_select, tagged as the top-k baseline.
SelectionResult topk_baseline(std::span<const double> base, std::size_t k);

/// Greedy farthest-point selection in cosine distance seeded at token 0: each
/// step maximizes min_{j in S} (1 - cos(f_i, f_j)). The seed's score is 1.
SelectionResult maxmin_baseline(const Matrix& features, std::size_t k);

/// Dispatches on strategy; `base` is ignored by the diversity strategies but
/// its length is still checked.
SelectionResult select_tokens(Strategy strategy, const Matrix& features, std::span<const double> base,
                              std::size_t k);

}  // namespace stprune
