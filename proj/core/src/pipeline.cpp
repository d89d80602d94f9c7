// SPDX-License-Identifier: Apache-2.0

#include "stprune/pipeline.hpp"

#include <algorithm>
#include <limits>

#include "stprune/error.hpp"
#include "stprune/similarity.hpp"

namespace stprune {

FlopEstimate estimate_flops(std::size_t original_tokens, std::size_t retained_tokens, const FlopModel& model) {
    if (original_tokens == 0) {
        throw Error(ErrorCode::domain_error, "flop estimate needs a non-empty original token count");
    }
    if (retained_tokens > original_tokens) {
        throw Error(ErrorCode::domain_error, "retained tokens exceed original tokens");
    }
    if (!(model.linear >= 0.0 && model.quadratic >= 0.0) || model.linear + model.quadratic == 0.0) {
        throw Error(ErrorCode::domain_error, "flop model coefficients must be non-negative and not both zero");
    }
    FlopEstimate out;
    out.original_cost = model.cost(static_cast<double>(original_tokens));
    out.retained_cost = model.cost(static_cast<double>(retained_tokens));
    out.ratio = retained_tokens == original_tokens ? 1.0 : out.retained_cost / out.original_cost;
    return out;
}

FlopEstimate estimate_flops(const EpisodeStats& stats, const FlopModel& model) {
    return estimate_flops(stats.original_tokens, stats.retained_tokens, model);
}

namespace {

struct FrameOutcome {
    SelectionResult selection;
    ImportanceVector importance;
};

FrameOutcome prune_frame_detailed(const TokenSet& tokens, const PruneConfig& config) {
    config.validate();
    tokens.validate();
    FrameOutcome out;
    out.importance = frame_importance(tokens, config.epsilon);
    const std::size_t k = config.resolve_budget(tokens.size());
    out.selection = select_tokens(config.strategy, tokens.features, out.importance.base, k);
    return out;
}

void check_dims(const TokenSet& current, std::span<const TokenSet> history) {
    for (const auto& frame : history) {
        frame.validate();
        if (frame.dim() != current.dim()) {
            throw Error(ErrorCode::dimension_mismatch, "all frames in an episode must share the feature width");
        }
    }
}

HistoryOptions history_options(const PruneConfig& config) {
    HistoryOptions opts;
    opts.alpha = config.alpha;
    opts.epsilon = config.epsilon;
    opts.strategy = config.strategy;
    opts.budget_mode = config.history_budget_mode;
    opts.threads = config.threads;
    return opts;
}

void fill_stats(PrunedEpisode& out, std::size_t current_n, std::size_t history_n, const FlopModel& model) {
    auto& s = out.stats;
    s.current_original = current_n;
    s.current_retained = out.current_selection.size();
    s.history_original = history_n;
    s.history_retained = out.memory.total_retained();
    s.original_tokens = s.current_original + s.history_original;
    s.retained_tokens = s.current_retained + s.history_retained;
    s.flops = estimate_flops(s, model);
}

}  // namespace

SelectionResult prune_frame(const TokenSet& tokens, const PruneConfig& config) {
    return prune_frame_detailed(tokens, config).selection;
}

PrunedEpisode prune_episode(const Episode& episode) {
    const auto& config = episode.config;
    config.validate();
    episode.current.validate();
    check_dims(episode.current, episode.history);

    PrunedEpisode out;
    auto current = prune_frame_detailed(episode.current, config);
    out.current_selection = std::move(current.selection);
    out.current_importance = std::move(current.importance);

    std::size_t history_n = 0;
    if (!episode.history.empty()) {
        const auto queries = QuerySet::from_selection(episode.current, out.current_selection);
        std::vector<std::size_t> budgets;
        budgets.reserve(episode.history.size());
        for (const auto& frame : episode.history) {
            budgets.push_back(config.resolve_budget(frame.size()));
            history_n += frame.size();
        }
        out.memory = compress_history(episode.history, queries, budgets, history_options(config));
    }

    if (config.merge_unselected) {
        MergedFeatures merged;
        merged.current = merge_unselected(episode.current, out.current_selection);
        for (std::size_t t = 0; t < episode.history.size(); ++t) {
            const auto& sel = out.memory.frames[t].selection;
            merged.history.push_back(sel.indices.empty() ? Matrix(0, episode.history[t].dim())
                                                         : merge_unselected(episode.history[t], sel));
        }
        out.merged_features = std::move(merged);
    }

    fill_stats(out, episode.current.size(), history_n, config.flop_model);
    return out;
}

std::vector<std::size_t> merge_assignment(const TokenSet& tokens, const SelectionResult& sel) {
    if (sel.indices.empty()) {
        throw Error(ErrorCode::empty_selection, "cannot merge into an empty selection");
    }
    const std::size_t n = tokens.size();
    constexpr auto unassigned = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> owner(n, unassigned);
    for (std::size_t pos = 0; pos < sel.indices.size(); ++pos) {
        if (sel.indices[pos] >= n || owner[sel.indices[pos]] != unassigned) {
            throw Error(ErrorCode::invalid_argument, "selection indices must be distinct and in range");
        }
        owner[sel.indices[pos]] = pos;
    }

    // Visit selected tokens by ascending token index so strict improvement
    // leaves ties with the lower index.
    std::vector<std::size_t> by_index(sel.indices.size());
    for (std::size_t p = 0; p < by_index.size(); ++p) {
        by_index[p] = p;
    }
    std::ranges::sort(by_index, {}, [&](std::size_t p) { return sel.indices[p]; });

    const SimilarityKernel kernel(tokens.features);
    std::vector<double> best(n, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> assignment(owner);
    std::vector<double> column(n);
    for (auto pos : by_index) {
        kernel.similarity_to_row(sel.indices[pos], column);
        for (std::size_t i = 0; i < n; ++i) {
            if (owner[i] == unassigned && column[i] > best[i]) {
                best[i] = column[i];
                assignment[i] = pos;
            }
        }
    }
    return assignment;
}

Matrix merge_unselected(const TokenSet& tokens, const SelectionResult& sel) {
    const auto assignment = merge_assignment(tokens, sel);
    const std::size_t d = tokens.dim();
    const std::size_t k = sel.indices.size();
    std::vector<double> sums(k * d, 0.0);
    std::vector<std::size_t> counts(k, 0);

    auto add_row = [&](std::size_t pos, std::size_t token) {
        const auto row = tokens.features.row(token);
        for (std::size_t c = 0; c < d; ++c) {
            sums[pos * d + c] += static_cast<double>(row[c]);
        }
        ++counts[pos];
    };
    for (std::size_t pos = 0; pos < k; ++pos) {
        add_row(pos, sel.indices[pos]);
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (sel.indices[assignment[i]] != i) {
            add_row(assignment[i], i);
        }
    }

    Matrix out(k, d);
    for (std::size_t pos = 0; pos < k; ++pos) {
        for (std::size_t c = 0; c < d; ++c) {
            out(pos, c) = static_cast<float>(sums[pos * d + c] / static_cast<double>(counts[pos]));
        }
    }
    return out;
}

StreamingPruner::StreamingPruner(PruneConfig config, HistoryUpdate update, std::size_t max_history)
    : m_config(std::move(config)), m_update(update), m_max_history(max_history) {
    m_config.validate();
}

std::size_t StreamingPruner::history_size() const noexcept {
    return m_update == HistoryUpdate::every_step ? m_history.size() : m_frozen.size();
}

void StreamingPruner::reset() {
    m_current.reset();
    m_current_selection = {};
    m_history.clear();
    m_frozen.clear();
    m_frozen_sizes.clear();
    m_frozen_merged.clear();
}

PrunedEpisode StreamingPruner::push(TokenSet frame) {
    frame.validate();
    if (m_current && m_current->dim() != frame.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "frame width differs from earlier frames");
    }

    if (m_update == HistoryUpdate::every_step) {
        if (m_current) {
            m_history.push_back(std::move(*m_current));
            if (m_max_history != 0 && m_history.size() > m_max_history) {
                m_history.erase(m_history.begin());
            }
        }
        m_current = std::move(frame);
        Episode ep{m_history, *m_current, m_config};
        auto out = prune_episode(ep);
        m_current_selection = out.current_selection;
        return out;
    }

    PrunedEpisode out;
    auto current = prune_frame_detailed(frame, m_config);
    out.current_selection = std::move(current.selection);
    out.current_importance = std::move(current.importance);

    if (m_current) {
        const auto queries = QuerySet::from_selection(frame, out.current_selection);
        const std::vector<std::size_t> budget{m_config.resolve_budget(m_current->size())};
        auto opts = history_options(m_config);
        opts.budget_mode = HistoryBudgetMode::per_frame;
        auto pool = compress_history(std::span<const TokenSet>(&*m_current, 1), queries, budget, opts);
        if (m_config.merge_unselected) {
            m_frozen_merged.push_back(merge_unselected(*m_current, pool.frames.front().selection));
        }
        m_frozen.push_back(std::move(pool.frames.front()));
        m_frozen_sizes.push_back(m_current->size());
        if (m_max_history != 0 && m_frozen.size() > m_max_history) {
            m_frozen.erase(m_frozen.begin());
            m_frozen_sizes.erase(m_frozen_sizes.begin());
            if (!m_frozen_merged.empty()) {
                m_frozen_merged.erase(m_frozen_merged.begin());
            }
        }
    }

    out.memory.frames = m_frozen;
    if (m_config.merge_unselected) {
        out.merged_features = MergedFeatures{m_frozen_merged, merge_unselected(frame, out.current_selection)};
    }
    std::size_t history_n = 0;
    for (auto n : m_frozen_sizes) {
        history_n += n;
    }
    fill_stats(out, frame.size(), history_n, m_config.flop_model);
    m_current_selection = out.current_selection;
    m_current = std::move(frame);
    return out;
}

}  // namespace stprune
