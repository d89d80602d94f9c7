// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stprune/config.hpp"
#include "stprune/pipeline.hpp"
#include "stprune/selector.hpp"

namespace stprune::selection_file {

inline constexpr std::string_view kFormat = "stprune-selection-1";

enum class Role { frame, history, current };

std::string_view to_string(Role r) noexcept;

struct FrameEntry {
    std::uint64_t frame_id = 0;
    Role role = Role::frame;
    SelectionResult selection;
    std::optional<Matrix> merged;
};

struct Stats {
    std::size_t original_tokens = 0;
    std::size_t retained_tokens = 0;
    std::size_t current_retained = 0;
    std::size_t history_retained = 0;
    double flop_ratio = 1.0;
    /// Pruning-stage wall time; only written when requested, since it would
    /// otherwise break byte-identical output.
    std::optional<double> prune_time_us;
};

/// Selection output for one CLI run. "mode" is "frame" or "episode".
struct SelectionFile {
    std::string mode = "episode";
    PruneConfig config;
    std::vector<FrameEntry> frames;
    Stats stats;
};

/// Deterministic JSON text: fixed key order, shortest round-trip doubles.
std::string encode(const SelectionFile& file);

/// Throws Error(malformed_dump) when the document does not match the format.
SelectionFile decode(std::string_view text);

/// History frames in order, then the current frame.
SelectionFile from_episode(const PrunedEpisode& pruned, const std::vector<std::uint64_t>& history_ids,
                           std::uint64_t current_id, const PruneConfig& config);

}  // namespace stprune::selection_file
