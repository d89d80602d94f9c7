// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "stprune/importance.hpp"

namespace stprune {

enum class Strategy {
    amm,             ///< importance x distinctness greedy
    diversity_only,  ///< distinctness alone
    semantics_only,  ///< top-k of base importance
    topk,            ///< relevance-driven baseline (same ranking as semantics_only)
    maxmin,          ///< farthest-point diversity baseline seeded at token 0
};

std::string_view to_string(Strategy s) noexcept;
/// Throws Error(invalid_argument) for unknown names.
Strategy parse_strategy(std::string_view name);

enum class HistoryBudgetMode {
    per_frame,  ///< each history frame keeps the same budget as the current frame
    pooled,     ///< one budget for all history, split by global final-importance rank
};

std::string_view to_string(HistoryBudgetMode m) noexcept;
HistoryBudgetMode parse_history_budget_mode(std::string_view name);

inline constexpr double kDefaultAlpha = 0.5;

/// Tokens kept when dropping `ratio` of n: floor(n * (1 - ratio)), at least 1.
/// The floor absorbs representation error (100 at 0.9 keeps 10, not 9).
std::size_t budget_from_ratio(std::size_t n_tokens, double ratio);

/// Downstream cost of one transformer pass over T visual tokens:
/// linear * T + quadratic * T^2.
struct FlopModel {
    double linear = 1.0;
    double quadratic = 0.0;

    /// Per-layer cost of a decoder layer of width `hidden`: 24 h^2 T for the
    /// projections and MLP plus 4 h T^2 for attention scores and mixing.
    static FlopModel transformer(std::size_t hidden);

    double cost(double tokens) const noexcept { return linear * tokens + quadratic * tokens * tokens; }
    bool operator==(const FlopModel&) const = default;
};

/// Budget is either an explicit token count or a pruning ratio (fraction of
/// tokens dropped). Exactly one must be set.
struct PruneConfig {
    std::optional<std::size_t> budget;
    std::optional<double> ratio;
    double alpha = kDefaultAlpha;
    double epsilon = kDefaultEpsilon;
    Strategy strategy = Strategy::amm;
    bool merge_unselected = false;
    HistoryBudgetMode history_budget_mode = HistoryBudgetMode::per_frame;
    FlopModel flop_model = FlopModel::transformer(3584);
    /// Worker cap for per-frame history pruning; 0 picks the hardware width.
    std::size_t threads = 1;

    /// Throws Error(invalid_argument) on a budget/ratio conflict or absence,
    /// Error(domain_error) on out-of-range alpha, epsilon or ratio.
    void validate() const;

    /// Budget for a frame of n tokens, clamped into [1, n].
    std::size_t resolve_budget(std::size_t n_tokens) const;
};

}  // namespace stprune
