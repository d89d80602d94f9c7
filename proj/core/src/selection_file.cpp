// SPDX-License-Identifier: Apache-2.0

#include "stprune/selection_file.hpp"

#include <nlohmann/json.hpp>

#include "stprune/error.hpp"

namespace stprune::selection_file {

namespace {

using ojson = nlohmann::ordered_json;

Role parse_role(std::string_view s) {
    if (s == "frame") {
        return Role::frame;
    }
    if (s == "history") {
        return Role::history;
    }
    if (s == "current") {
        return Role::current;
    }
    throw Error(ErrorCode::malformed_dump, "unknown frame role '" + std::string(s) + "'");
}

ojson matrix_json(const Matrix& m) {
    auto rows = ojson::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        rows.push_back(std::vector<float>(r.begin(), r.end()));
    }
    return rows;
}

}  // namespace

std::string_view to_string(Role r) noexcept {
    switch (r) {
    case Role::frame:
        return "frame";
    case Role::history:
        return "history";
    case Role::current:
        return "current";
    }
    return "frame";
}

std::string encode(const SelectionFile& file) {
    ojson doc;
    doc["format"] = kFormat;
    doc["mode"] = file.mode;

    ojson cfg;
    cfg["strategy"] = to_string(file.config.strategy);
    if (file.config.budget) {
        cfg["budget"] = *file.config.budget;
    } else {
        cfg["budget"] = nullptr;
    }
    if (file.config.ratio) {
        cfg["ratio"] = *file.config.ratio;
    } else {
        cfg["ratio"] = nullptr;
    }
    cfg["alpha"] = file.config.alpha;
    cfg["epsilon"] = file.config.epsilon;
    cfg["merge"] = file.config.merge_unselected;
    cfg["history_budget_mode"] = to_string(file.config.history_budget_mode);
    doc["config"] = std::move(cfg);

    auto frames = ojson::array();
    for (const auto& f : file.frames) {
        ojson jf;
        jf["frame_id"] = f.frame_id;
        jf["role"] = to_string(f.role);
        jf["strategy"] = to_string(f.selection.strategy);
        jf["budget"] = f.selection.budget;
        jf["indices"] = f.selection.indices;
        jf["step_scores"] = f.selection.step_scores;
        if (f.merged) {
            jf["merged_features"] = matrix_json(*f.merged);
        }
        frames.push_back(std::move(jf));
    }
    doc["frames"] = std::move(frames);

    ojson stats;
    stats["original_tokens"] = file.stats.original_tokens;
    stats["retained_tokens"] = file.stats.retained_tokens;
    stats["current_retained"] = file.stats.current_retained;
    stats["history_retained"] = file.stats.history_retained;
    stats["flop_ratio"] = file.stats.flop_ratio;
    if (file.stats.prune_time_us) {
        stats["prune_time_us"] = *file.stats.prune_time_us;
    }
    doc["stats"] = std::move(stats);
    return doc.dump(2) + "\n";
}

SelectionFile decode(std::string_view text) {
    try {
        const auto doc = ojson::parse(text);
        if (doc.at("format").get<std::string>() != kFormat) {
            throw Error(ErrorCode::malformed_dump, "not a selection file");
        }
        SelectionFile out;
        out.mode = doc.at("mode").get<std::string>();

        const auto& cfg = doc.at("config");
        out.config.strategy = parse_strategy(cfg.at("strategy").get<std::string>());
        if (!cfg.at("budget").is_null()) {
            out.config.budget = cfg.at("budget").get<std::size_t>();
        }
        if (!cfg.at("ratio").is_null()) {
            out.config.ratio = cfg.at("ratio").get<double>();
        }
        out.config.alpha = cfg.at("alpha").get<double>();
        out.config.epsilon = cfg.at("epsilon").get<double>();
        out.config.merge_unselected = cfg.at("merge").get<bool>();
        out.config.history_budget_mode = parse_history_budget_mode(cfg.at("history_budget_mode").get<std::string>());

        for (const auto& jf : doc.at("frames")) {
            FrameEntry f;
            f.frame_id = jf.at("frame_id").get<std::uint64_t>();
            f.role = parse_role(jf.at("role").get<std::string>());
            f.selection.strategy = parse_strategy(jf.at("strategy").get<std::string>());
            f.selection.budget = jf.at("budget").get<std::size_t>();
            f.selection.indices = jf.at("indices").get<std::vector<std::size_t>>();
            f.selection.step_scores = jf.at("step_scores").get<std::vector<double>>();
            if (f.selection.indices.size() != f.selection.step_scores.size()) {
                throw Error(ErrorCode::malformed_dump, "indices and step_scores differ in length");
            }
            if (jf.contains("merged_features")) {
                const auto rows = jf.at("merged_features").get<std::vector<std::vector<float>>>();
                const std::size_t width = rows.empty() ? 0 : rows.front().size();
                std::vector<float> flat;
                for (const auto& r : rows) {
                    if (r.size() != width) {
                        throw Error(ErrorCode::malformed_dump, "ragged merged_features");
                    }
                    flat.insert(flat.end(), r.begin(), r.end());
                }
                f.merged = Matrix(rows.size(), width, std::move(flat));
            }
            out.frames.push_back(std::move(f));
        }

        const auto& st = doc.at("stats");
        out.stats.original_tokens = st.at("original_tokens").get<std::size_t>();
        out.stats.retained_tokens = st.at("retained_tokens").get<std::size_t>();
        out.stats.current_retained = st.at("current_retained").get<std::size_t>();
        out.stats.history_retained = st.at("history_retained").get<std::size_t>();
        out.stats.flop_ratio = st.at("flop_ratio").get<double>();
        if (st.contains("prune_time_us")) {
            out.stats.prune_time_us = st.at("prune_time_us").get<double>();
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::malformed_dump, std::string("bad selection file: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::malformed_dump) {
            throw;
        }
        throw Error(ErrorCode::malformed_dump, e.what());
    }
}

SelectionFile from_episode(const PrunedEpisode& pruned, const std::vector<std::uint64_t>& history_ids,
                           std::uint64_t current_id, const PruneConfig& config) {
    if (history_ids.size() != pruned.memory.frames.size()) {
        throw Error(ErrorCode::length_mismatch, "one id per history frame is required");
    }
    SelectionFile out;
    out.mode = "episode";
    out.config = config;
    for (std::size_t t = 0; t < history_ids.size(); ++t) {
        FrameEntry f{history_ids[t], Role::history, pruned.memory.frames[t].selection, std::nullopt};
        if (pruned.merged_features) {
            f.merged = pruned.merged_features->history[t];
        }
        out.frames.push_back(std::move(f));
    }
    FrameEntry cur{current_id, Role::current, pruned.current_selection, std::nullopt};
    if (pruned.merged_features) {
        cur.merged = pruned.merged_features->current;
    }
    out.frames.push_back(std::move(cur));

    out.stats.original_tokens = pruned.stats.original_tokens;
    out.stats.retained_tokens = pruned.stats.retained_tokens;
    out.stats.current_retained = pruned.stats.current_retained;
    out.stats.history_retained = pruned.stats.history_retained;
    out.stats.flop_ratio = pruned.stats.flops.ratio;
    return out;
}

}  // namespace stprune::selection_file
