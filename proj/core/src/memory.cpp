// SPDX-License-Identifier: Apache-2.0

#include "stprune/memory.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "stprune/error.hpp"
#include "stprune/parallel.hpp"
#include "stprune/similarity.hpp"

namespace stprune {

QuerySet QuerySet::from_selection(const TokenSet& current, const SelectionResult& selection) {
    if (selection.indices.empty()) {
        throw Error(ErrorCode::empty_selection, "query set needs at least one retained token");
    }
    QuerySet q;
    q.features = current.features.gather(selection.indices);
    q.source_indices = selection.indices;
    return q;
}

std::vector<double> st_relevance(const Matrix& history, const QuerySet& queries) {
    if (queries.features.rows() == 0) {
        throw Error(ErrorCode::invalid_argument, "query set is empty");
    }
    if (history.cols() != queries.features.cols()) {
        throw Error(ErrorCode::shape_mismatch, "history and query widths differ");
    }
    const SimilarityKernel kernel(history);
    std::vector<double> best(history.rows(), -1.0);
    std::vector<double> column(history.rows());
    for (std::size_t q = 0; q < queries.features.rows(); ++q) {
        kernel.similarity_to(queries.features.row(q), column);
        for (std::size_t i = 0; i < best.size(); ++i) {
            best[i] = std::max(best[i], column[i]);
        }
    }
    for (auto& r : best) {
        r = std::clamp(r, 0.0, 1.0);
    }
    return best;
}

std::vector<double> st_relevance(const TokenSet& history, const QuerySet& queries) {
    return st_relevance(history.features, queries);
}

std::vector<double> reweight(std::span<const double> base, std::span<const double> relevance, double alpha) {
    if (base.size() != relevance.size()) {
        throw Error(ErrorCode::length_mismatch, "importance and relevance lengths differ");
    }
    if (!(alpha >= 0.5 && alpha <= 1.0)) {
        throw Error(ErrorCode::domain_error, "alpha must lie in [0.5, 1]");
    }
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!std::ranges::all_of(relevance, in_unit) || !std::ranges::all_of(base, in_unit)) {
        throw Error(ErrorCode::domain_error, "importance and relevance must lie in [0, 1]");
    }
    std::vector<double> out(base.size());
    const double spread = 1.0 - alpha;
    for (std::size_t i = 0; i < base.size(); ++i) {
        out[i] = base[i] * (alpha + spread * relevance[i]);
    }
    return out;
}

SelectionResult prune_history(const TokenSet& history, std::span<const double> base, const QuerySet& queries,
                              std::size_t k, double alpha) {
    const auto final_importance = reweight(base, st_relevance(history, queries), alpha);
    return amm_select(history.features, final_importance, k);
}

std::size_t MemoryPool::total_retained() const noexcept {
    std::size_t total = 0;
    for (const auto& f : frames) {
        total += f.selection.size();
    }
    return total;
}

namespace {

// Splits the pooled history budget: each frame keeps as many tokens as it
// places in the global top-`total` by score (ties: earlier frame, lower index).
std::vector<std::size_t> pooled_budgets(const std::vector<const std::vector<double>*>& scores, std::size_t total) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> ranked;
    for (std::size_t f = 0; f < scores.size(); ++f) {
        for (std::size_t i = 0; i < scores[f]->size(); ++i) {
            ranked.emplace_back((*scores[f])[i], f, i);
        }
    }
    total = std::min(total, ranked.size());
    std::ranges::partial_sort(ranked, ranked.begin() + static_cast<std::ptrdiff_t>(total),
                              [](const auto& a, const auto& b) {
                                  if (std::get<0>(a) != std::get<0>(b)) {
                                      return std::get<0>(a) > std::get<0>(b);
                                  }
                                  return std::tie(std::get<1>(a), std::get<2>(a)) <
                                         std::tie(std::get<1>(b), std::get<2>(b));
                              });
    std::vector<std::size_t> out(scores.size(), 0);
    for (std::size_t r = 0; r < total; ++r) {
        ++out[std::get<1>(ranked[r])];
    }
    return out;
}

}  // namespace

MemoryPool compress_history(std::span<const TokenSet> history, const QuerySet& queries,
                            std::span<const std::size_t> budgets, const HistoryOptions& options) {
    if (budgets.size() != history.size()) {
        throw Error(ErrorCode::length_mismatch, "one budget per history frame is required");
    }
    MemoryPool pool;
    pool.frames.resize(history.size());
    const bool reweighted = options.strategy == Strategy::amm;

    parallel_for(history.size(), options.threads, [&](std::size_t t) {
        const auto& frame = history[t];
        if (frame.dim() != queries.features.cols()) {
            throw Error(ErrorCode::dimension_mismatch, "history frame width differs from current frame");
        }
        auto& slot = pool.frames[t];
        slot.frame_id = frame.frame_id;
        slot.importance = frame_importance(frame, options.epsilon);
        if (reweighted) {
            slot.importance.final = reweight(slot.importance.base, st_relevance(frame, queries), options.alpha);
        }
    });

    std::vector<std::size_t> frame_budgets(budgets.begin(), budgets.end());
    if (options.budget_mode == HistoryBudgetMode::pooled) {
        std::vector<const std::vector<double>*> scores;
        for (const auto& f : pool.frames) {
            scores.push_back(f.importance.final ? &*f.importance.final : &f.importance.base);
        }
        frame_budgets = pooled_budgets(scores, std::accumulate(budgets.begin(), budgets.end(), std::size_t{0}));
    }

    parallel_for(history.size(), options.threads, [&](std::size_t t) {
        auto& slot = pool.frames[t];
        const std::size_t k = std::min(frame_budgets[t], history[t].size());
        if (k == 0) {
            slot.selection = SelectionResult{{}, {}, options.strategy, 0};
            return;
        }
        const auto& weights = slot.importance.final ? *slot.importance.final : slot.importance.base;
        slot.selection = select_tokens(options.strategy, history[t].features, weights, k);
    });
    return pool;
}

}  // namespace stprune
