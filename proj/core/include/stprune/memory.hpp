// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stprune/config.hpp"
#include "stprune/importance.hpp"
#include "stprune/selector.hpp"
#include "stprune/token_set.hpp"

namespace stprune {

/// Retained current-frame rows, used as queries when scoring history tokens.
struct QuerySet {
    Matrix features;
    std::vector<std::size_t> source_indices;

    /// Copies the selected rows of `current` in selection order.
    static QuerySet from_selection(const TokenSet& current, const SelectionResult& selection);
};

/// R[i] = max over queries of cos(history_i, q), clamped to [0, 1].
/// Throws Error(shape_mismatch) on a width mismatch and
/// Error(invalid_argument) for an empty query set.
std::vector<double> st_relevance(const Matrix& history, const QuerySet& queries);
std::vector<double> st_relevance(const TokenSet& history, const QuerySet& queries);

/// final[i] = base[i] * (alpha + (1 - alpha) * R[i]).
std::vector<double> reweight(std::span<const double> base, std::span<const double> relevance, double alpha);

/// A-MMR over the query-re-weighted importance of one history frame.
SelectionResult prune_history(const TokenSet& history, std::span<const double> base, const QuerySet& queries,
                              std::size_t k, double alpha);

struct MemoryFrame {
    std::uint64_t frame_id = 0;
    SelectionResult selection;
    ImportanceVector importance;
};

/// Retained history tokens, one entry per history frame in input order.
struct MemoryPool {
    std::vector<MemoryFrame> frames;

    std::size_t total_retained() const noexcept;
    bool empty() const noexcept { return frames.empty(); }
};

struct HistoryOptions {
    double alpha = kDefaultAlpha;
    double epsilon = kDefaultEpsilon;
    Strategy strategy = Strategy::amm;
    HistoryBudgetMode budget_mode = HistoryBudgetMode::per_frame;
    std::size_t threads = 1;
};

/// Prunes every history frame against `queries`. budgets[t] is frame t's
/// budget, already clamped to its token count. With Strategy::amm frames are
/// re-weighted by relevance first; other strategies prune each frame on its
/// own importance. In pooled mode the sum of budgets is redistributed by the
/// global final-importance rank and a frame may keep zero tokens.
MemoryPool compress_history(std::span<const TokenSet> history, const QuerySet& queries,
                            std::span<const std::size_t> budgets, const HistoryOptions& options);

}  // namespace stprune
