// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "stprune/config.hpp"
#include "stprune/memory.hpp"
#include "stprune/selector.hpp"
#include "stprune/token_set.hpp"

namespace stprune {

/// History frames (oldest first) plus the current frame.
struct Episode {
    std::vector<TokenSet> history;
    TokenSet current;
    PruneConfig config;
};

struct FlopEstimate {
    double ratio = 1.0;
    double retained_cost = 0.0;
    double original_cost = 0.0;
};

struct EpisodeStats {
    std::size_t original_tokens = 0;
    std::size_t retained_tokens = 0;
    std::size_t current_original = 0;
    std::size_t current_retained = 0;
    std::size_t history_original = 0;
    std::size_t history_retained = 0;
    FlopEstimate flops;
};

/// Merged rows when the merge variant is on; row count equals the retained
/// count of each frame.
struct MergedFeatures {
    std::vector<Matrix> history;
    Matrix current;
};

/// Hand-off payload for the projector/LLM stage.
struct PrunedEpisode {
    SelectionResult current_selection;
    ImportanceVector current_importance;
    MemoryPool memory;
    std::optional<MergedFeatures> merged_features;
    EpisodeStats stats;
};

/// cost(retained) / cost(original) under `model`. Throws Error(domain_error)
/// when original is zero or retained exceeds original.
FlopEstimate estimate_flops(std::size_t original_tokens, std::size_t retained_tokens, const FlopModel& model);
FlopEstimate estimate_flops(const EpisodeStats& stats, const FlopModel& model);

/// Importance, budget resolution and strategy dispatch for a single frame.
SelectionResult prune_frame(const TokenSet& tokens, const PruneConfig& config);

/// Current frame first; its retained rows become the queries for every
/// history frame. Empty history yields an empty memory pool.
PrunedEpisode prune_episode(const Episode& episode);

/// For each token, the position in sel.indices of the selected token it folds
/// into: itself when selected, otherwise the most cosine-similar selected
/// token (ties to the lower token index).
std::vector<std::size_t> merge_assignment(const TokenSet& tokens, const SelectionResult& sel);

/// Row j is the unweighted mean of selected token j and every unselected token
/// assigned to it. Throws Error(empty_selection) for an empty selection.
Matrix merge_unselected(const TokenSet& tokens, const SelectionResult& sel);

enum class HistoryUpdate {
    once_on_arrival,  ///< a frame is pruned once, when it leaves the current slot
    every_step,       ///< all kept frames are re-pruned against each new query set
};

/// Frame-by-frame driver. Each push makes the new frame current and returns
/// the pruned episode for that step.
class StreamingPruner {
public:
    StreamingPruner(PruneConfig config, HistoryUpdate update = HistoryUpdate::once_on_arrival,
                    std::size_t max_history = 0);

    PrunedEpisode push(TokenSet frame);

    std::size_t history_size() const noexcept;
    void reset();

private:
    PruneConfig m_config;
    HistoryUpdate m_update;
    std::size_t m_max_history;  // 0 keeps everything
    std::optional<TokenSet> m_current;
    SelectionResult m_current_selection;
    std::vector<TokenSet> m_history;   // every_step: full frames
    std::vector<MemoryFrame> m_frozen;  // once_on_arrival: pruned frames
    std::vector<std::size_t> m_frozen_sizes;
    std::vector<Matrix> m_frozen_merged;
};

}  // namespace stprune
