// SPDX-License-Identifier: Apache-2.0

#include "stprune/config.hpp"

#include <algorithm>
#include <cmath>

#include "stprune/error.hpp"

namespace stprune {

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
    case Strategy::amm:
        return "amm";
    case Strategy::diversity_only:
        return "diversity_only";
    case Strategy::semantics_only:
        return "semantics_only";
    case Strategy::topk:
        return "topk";
    case Strategy::maxmin:
        return "maxmin";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    for (auto s : {Strategy::amm, Strategy::diversity_only, Strategy::semantics_only, Strategy::topk,
                   Strategy::maxmin}) {
        if (name == to_string(s)) {
            return s;
        }
    }
    throw Error(ErrorCode::invalid_argument, "unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(HistoryBudgetMode m) noexcept {
    return m == HistoryBudgetMode::pooled ? "pooled" : "per-frame";
}

HistoryBudgetMode parse_history_budget_mode(std::string_view name) {
    if (name == "per-frame") {
        return HistoryBudgetMode::per_frame;
    }
    if (name == "pooled") {
        return HistoryBudgetMode::pooled;
    }
    throw Error(ErrorCode::invalid_argument, "unknown history budget mode '" + std::string(name) + "'");
}

FlopModel FlopModel::transformer(std::size_t hidden) {
    const double h = static_cast<double>(hidden);
    return {24.0 * h * h, 4.0 * h};
}

std::size_t budget_from_ratio(std::size_t n_tokens, double ratio) {
    const double kept = static_cast<double>(n_tokens) * (1.0 - ratio);
    const double floored = std::floor(kept + 1e-9);
    if (!(floored >= 1.0)) {
        return 1;
    }
    return std::min(static_cast<std::size_t>(floored), std::max<std::size_t>(n_tokens, 1));
}

void PruneConfig::validate() const {
    if (budget.has_value() == ratio.has_value()) {
        throw Error(ErrorCode::invalid_argument, "exactly one of budget and ratio must be set");
    }
    if (budget && *budget == 0) {
        throw Error(ErrorCode::domain_error, "budget must be positive");
    }
    if (ratio && !(*ratio > 0.0 && *ratio < 1.0)) {
        throw Error(ErrorCode::domain_error, "ratio must lie in (0, 1)");
    }
    if (!(alpha >= 0.5 && alpha <= 1.0)) {
        throw Error(ErrorCode::domain_error, "alpha must lie in [0.5, 1]");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw Error(ErrorCode::domain_error, "epsilon must be positive");
    }
    if (!(flop_model.linear >= 0.0 && flop_model.quadratic >= 0.0) ||
        flop_model.linear + flop_model.quadratic == 0.0) {
        throw Error(ErrorCode::domain_error, "flop model coefficients must be non-negative and not both zero");
    }
}

std::size_t PruneConfig::resolve_budget(std::size_t n_tokens) const {
    validate();
    const std::size_t k = budget ? *budget : budget_from_ratio(n_tokens, *ratio);
    return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(n_tokens, 1));
}

}  // namespace stprune
