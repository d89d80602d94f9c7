// SPDX-License-Identifier: Apache-2.0

#include "stprune_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stprune/dump.hpp"
#include "stprune/error.hpp"
#include "stprune/pipeline.hpp"
#include "stprune/quality.hpp"
#include "stprune/selection_file.hpp"
#include "stprune/synth.hpp"
#include "stprune/version.hpp"

namespace stprune::cli {

namespace {

using Clock = std::chrono::steady_clock;

// Consumes benchmark results so the timed calls cannot be elided.
volatile std::size_t g_bench_sink = 0;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<Strategy> parse_strategies(const std::vector<std::string>& names) {
    std::vector<Strategy> out;
    for (const auto& n : names) {
        out.push_back(parse_strategy(n));
    }
    return out;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        dump::write_bytes_atomic(path, text);
    }
}

// Maps library errors raised while handling a subcommand onto exit codes.
int exit_code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::malformed_dump:
    case ErrorCode::io_error:
        return kMalformedInput;
    case ErrorCode::dimension_mismatch:
        return kDimensionMismatch;
    case ErrorCode::invalid_argument:
    case ErrorCode::domain_error:
        return kFlagError;
    default:
        return kFailure;
    }
}

struct PruneFlags {
    std::string input;
    std::string output;
    double ratio = 0.0;
    std::size_t budget = 0;
    double alpha = kDefaultAlpha;
    double epsilon = kDefaultEpsilon;
    std::string strategy = "amm";
    bool merge = false;
    std::string mode = "episode";
    std::string history_budget_mode = "per-frame";
    bool timing = false;
    double flop_linear = FlopModel::transformer(3584).linear;
    double flop_quadratic = FlopModel::transformer(3584).quadratic;
};

PruneConfig config_from(const PruneFlags& f, bool has_ratio, bool has_budget) {
    PruneConfig cfg;
    if (has_ratio) {
        cfg.ratio = f.ratio;
    }
    if (has_budget) {
        cfg.budget = f.budget;
    }
    cfg.alpha = f.alpha;
    cfg.epsilon = f.epsilon;
    cfg.strategy = parse_strategy(f.strategy);
    cfg.merge_unselected = f.merge;
    cfg.history_budget_mode = parse_history_budget_mode(f.history_budget_mode);
    cfg.flop_model = {f.flop_linear, f.flop_quadratic};
    cfg.threads = threads_from_env();
    cfg.validate();
    return cfg;
}

int cmd_prune(const PruneFlags& f, bool has_ratio, bool has_budget, std::ostream& out, std::ostream& err) {
    if (has_ratio == has_budget) {
        err << "prune: exactly one of --ratio and --budget is required\n";
        return kFlagError;
    }
    PruneConfig cfg;
    try {
        cfg = config_from(f, has_ratio, has_budget);
    } catch (const Error& e) {
        err << "prune: " << e.what() << "\n";
        return kFlagError;
    }

    std::vector<TokenSet> frames;
    try {
        frames = dump::read_file(f.input);
    } catch (const Error& e) {
        err << "prune: " << e.what() << "\n";
        return exit_code_for(e);
    }

    try {
        selection_file::SelectionFile file;
        const auto start = Clock::now();
        if (f.mode == "frame") {
            file.mode = "frame";
            file.config = cfg;
            std::size_t original = 0;
            std::size_t retained = 0;
            for (const auto& frame : frames) {
                auto sel = prune_frame(frame, cfg);
                original += frame.size();
                retained += sel.size();
                std::optional<Matrix> merged;
                if (cfg.merge_unselected) {
                    merged = merge_unselected(frame, sel);
                }
                file.frames.push_back({frame.frame_id, selection_file::Role::frame, std::move(sel), std::move(merged)});
            }
            file.stats.original_tokens = original;
            file.stats.retained_tokens = retained;
            file.stats.current_retained = retained;
            file.stats.flop_ratio = estimate_flops(original, retained, cfg.flop_model).ratio;
        } else {
            Episode ep;
            ep.config = cfg;
            ep.current = std::move(frames.back());
            frames.pop_back();
            ep.history = std::move(frames);
            const auto pruned = prune_episode(ep);
            std::vector<std::uint64_t> ids;
            for (const auto& h : ep.history) {
                ids.push_back(h.frame_id);
            }
            file = selection_file::from_episode(pruned, ids, ep.current.frame_id, cfg);
        }
        const auto elapsed = std::chrono::duration<double, std::micro>(Clock::now() - start).count();
        if (f.timing) {
            file.stats.prune_time_us = elapsed;
        }
        emit(selection_file::encode(file), f.output, out);
    } catch (const Error& e) {
        err << "prune: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kOk;
}

struct SweepFlags {
    std::string input;
    std::string output;
    std::vector<double> ratios{0.7, 0.8, 0.9};
    std::vector<std::size_t> budgets;
    std::vector<std::string> strategies{"amm", "topk", "maxmin", "diversity_only"};
    double epsilon = kDefaultEpsilon;
};

int cmd_sweep(const SweepFlags& f, std::ostream& out, std::ostream& err) {
    std::vector<Strategy> strategies;
    try {
        strategies = parse_strategies(f.strategies);
        for (double r : f.ratios) {
            if (!(r > 0.0 && r < 1.0)) {
                throw Error(ErrorCode::domain_error, "ratios must lie in (0, 1)");
            }
        }
        if (std::ranges::find(f.budgets, std::size_t{0}) != f.budgets.end()) {
            throw Error(ErrorCode::domain_error, "budgets must be positive");
        }
    } catch (const Error& e) {
        err << "sweep: " << e.what() << "\n";
        return kFlagError;
    }
    try {
        const auto frames = dump::read_file(f.input);
        for (const auto& frame : frames) {
            if (frame.dim() != frames.front().dim()) {
                throw Error(ErrorCode::dimension_mismatch, "all frames must share the feature width");
            }
        }
        const auto rows = run_sweep(frames, strategies, f.ratios, f.budgets, f.epsilon);
        emit(format_sweep_csv(rows), f.output, out);
    } catch (const Error& e) {
        err << "sweep: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kOk;
}

struct BenchFlags {
    BenchOptions options;
    std::vector<std::string> strategies{"amm"};
    std::size_t budget = 72;
    double ratio = 0.0;
    bool json = false;
};

int cmd_bench(BenchFlags f, bool has_ratio, std::ostream& out, std::ostream& err) {
    try {
        f.options.strategies = parse_strategies(f.strategies);
        if (has_ratio) {
            f.options.ratio = f.ratio;
            f.options.budget.reset();
        } else {
            f.options.budget = f.budget;
        }
        if (f.options.tokens == 0 || f.options.dim == 0 || f.options.iters == 0) {
            throw Error(ErrorCode::invalid_argument, "--n, --dim and --iters must be positive");
        }
        const auto rows = run_bench(f.options);
        if (f.json) {
            nlohmann::ordered_json doc = nlohmann::ordered_json::array();
            for (const auto& r : rows) {
                doc.push_back({{"strategy", to_string(r.strategy)},
                               {"tokens", f.options.tokens},
                               {"dim", f.options.dim},
                               {"budget", r.budget},
                               {"samples", r.samples},
                               {"median_us", r.median_us},
                               {"p95_us", r.p95_us},
                               {"min_us", r.min_us},
                               {"tokens_per_second", r.tokens_per_second}});
            }
            out << doc.dump(2) << "\n";
        } else {
            char line[256];
            std::snprintf(line, sizeof(line), "%-16s %6s %6s %6s %8s %12s %12s %12s %14s\n", "strategy", "n", "dim",
                          "budget", "samples", "median_us", "p95_us", "min_us", "tokens_per_s");
            out << line;
            for (const auto& r : rows) {
                std::snprintf(line, sizeof(line), "%-16s %6zu %6zu %6zu %8zu %12.2f %12.2f %12.2f %14.0f\n",
                              std::string(to_string(r.strategy)).c_str(), f.options.tokens, f.options.dim, r.budget,
                              r.samples, r.median_us, r.p95_us, r.min_us, r.tokens_per_second);
                out << line;
            }
        }
    } catch (const Error& e) {
        err << "bench: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kOk;
}

struct GenFlags {
    synth::EpisodeSpec spec;
    std::string output;
    std::string meta;
    std::string format = "binary";
};

int cmd_gen(const GenFlags& f, std::ostream& err) {
    try {
        f.spec.validate();
    } catch (const Error& e) {
        err << "gen: " << e.what() << "\n";
        return kMalformedInput;
    }
    try {
        const auto episode = synth::generate_episode(f.spec);
        dump::write_file(f.output, episode.frames, f.format == "text" ? dump::Format::text : dump::Format::binary);

        nlohmann::ordered_json meta;
        meta["seed"] = f.spec.seed;
        meta["frames"] = f.spec.frames;
        meta["tokens"] = f.spec.tokens;
        meta["dim"] = f.spec.dim;
        meta["clusters"] = f.spec.clusters;
        meta["planted_clusters"] = episode.planted_clusters;
        auto per_frame = nlohmann::ordered_json::array();
        for (std::size_t t = 0; t < episode.frames.size(); ++t) {
            per_frame.push_back({{"frame_id", episode.frames[t].frame_id},
                                 {"cluster_of", episode.truth[t].cluster_of}});
        }
        meta["cluster_assignment"] = std::move(per_frame);
        const std::string meta_path = f.meta.empty() ? f.output + ".meta.json" : f.meta;
        dump::write_bytes_atomic(meta_path, meta.dump(1) + "\n");
    } catch (const Error& e) {
        err << "gen: " << e.what() << "\n";
        return e.code() == ErrorCode::io_error ? kFailure : exit_code_for(e);
    }
    return kOk;
}

}  // namespace

std::size_t threads_from_env() {
    const char* raw = std::getenv("ST_PRUNE_THREADS");
    if (raw == nullptr || *raw == '\0') {
        return 1;
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0') {
        throw Error(ErrorCode::invalid_argument, "ST_PRUNE_THREADS must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

double median(std::vector<double> samples) {
    if (samples.empty()) {
        return 0.0;
    }
    std::ranges::sort(samples);
    const std::size_t mid = samples.size() / 2;
    return samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

double percentile95(std::vector<double> samples) {
    if (samples.empty()) {
        return 0.0;
    }
    std::ranges::sort(samples);
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(samples.size())));
    return samples[std::max<std::size_t>(rank, 1) - 1];
}

std::vector<BenchRow> run_bench(const BenchOptions& options) {
    const auto frame = synth::random_frame(options.tokens, options.dim, options.seed);
    std::vector<BenchRow> rows;
    for (auto strategy : options.strategies) {
        PruneConfig cfg;
        cfg.strategy = strategy;
        cfg.budget = options.budget;
        cfg.ratio = options.ratio;
        cfg.validate();

        std::size_t sink = 0;
        for (std::size_t w = 0; w < options.warmup; ++w) {
            sink += prune_frame(frame, cfg).size();
        }
        std::vector<double> samples;
        samples.reserve(options.iters);
        std::size_t budget = 0;
        for (std::size_t it = 0; it < options.iters; ++it) {
            const auto t0 = Clock::now();
            const auto sel = prune_frame(frame, cfg);
            const auto t1 = Clock::now();
            budget = sel.size();
            sink += budget;
            samples.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
        }
        BenchRow row;
        row.strategy = strategy;
        row.budget = budget;
        row.samples = samples.size();
        row.median_us = median(samples);
        row.p95_us = percentile95(samples);
        row.min_us = samples.empty() ? 0.0 : *std::ranges::min_element(samples);
        row.tokens_per_second =
            row.median_us > 0.0 ? static_cast<double>(options.tokens) / (row.median_us * 1e-6) : 0.0;
        rows.push_back(row);
        g_bench_sink = sink;
    }
    return rows;
}

std::vector<SweepRow> run_sweep(const std::vector<TokenSet>& frames, const std::vector<Strategy>& strategies,
                                const std::vector<double>& ratios, const std::vector<std::size_t>& budgets,
                                double epsilon) {
    if (frames.empty()) {
        throw Error(ErrorCode::invalid_argument, "sweep needs at least one frame");
    }
    std::vector<ImportanceVector> importance;
    importance.reserve(frames.size());
    for (const auto& frame : frames) {
        importance.push_back(frame_importance(frame, epsilon));
    }

    std::vector<SweepRow> rows;
    auto add_rows = [&](std::optional<double> ratio, std::optional<std::size_t> budget) {
        for (auto strategy : strategies) {
            PruneConfig cfg;
            cfg.ratio = ratio;
            cfg.budget = budget;
            cfg.epsilon = epsilon;
            SweepRow row;
            row.strategy = strategy;
            row.ratio = ratio;
            row.frames = frames.size();
            row.budget = cfg.resolve_budget(frames.front().size());
            double mass = 0.0;
            double cover = 0.0;
            for (std::size_t t = 0; t < frames.size(); ++t) {
                const auto k = cfg.resolve_budget(frames[t].size());
                const auto sel = select_tokens(strategy, frames[t].features, importance[t].base, k);
                mass += importance_mass(importance[t].base, sel.indices);
                cover += coverage(frames[t].features, sel.indices);
            }
            row.importance_mass = mass / static_cast<double>(frames.size());
            row.coverage = cover / static_cast<double>(frames.size());
            rows.push_back(row);
        }
    };
    for (double r : ratios) {
        add_rows(r, std::nullopt);
    }
    for (auto b : budgets) {
        add_rows(std::nullopt, b);
    }
    return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "strategy,ratio,budget,frames,importance_mass,coverage\n";
    for (const auto& r : rows) {
        os << to_string(r.strategy) << ',' << (r.ratio ? format_double(*r.ratio) : std::string()) << ','
           << r.budget << ',' << r.frames << ',' << format_double(r.importance_mass) << ','
           << format_double(r.coverage) << '\n';
    }
    return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spatio-temporal vision-token pruning engine"};
    app.name(args.empty() ? "stprune" : std::filesystem::path(args.front()).filename().string());
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    PruneFlags pf;
    auto* prune = app.add_subcommand("prune", "Prune the frames of a token dump and write a selection file");
    prune->add_option("--input", pf.input, "Token dump (binary or text)")->required();
    auto* ratio_opt = prune->add_option("--ratio", pf.ratio, "Fraction of tokens to drop, in (0,1)");
    auto* budget_opt = prune->add_option("--budget", pf.budget, "Tokens to keep per frame");
    ratio_opt->excludes(budget_opt);
    prune->add_option("--alpha", pf.alpha, "History re-weighting floor, in [0.5,1]")->capture_default_str();
    prune->add_option("--epsilon", pf.epsilon, "Normalization epsilon")->capture_default_str();
    prune->add_option("--strategy", pf.strategy, "amm|diversity_only|semantics_only|topk|maxmin")
        ->capture_default_str();
    prune->add_flag("--merge", pf.merge, "Fold dropped tokens into their nearest retained token");
    prune->add_option("--mode", pf.mode, "frame: prune every frame alone; episode: last frame is current")
        ->check(CLI::IsMember({"frame", "episode"}))
        ->capture_default_str();
    prune->add_option("--history-budget-mode", pf.history_budget_mode, "per-frame|pooled")
        ->check(CLI::IsMember({"per-frame", "pooled"}))
        ->capture_default_str();
    prune->add_option("--output", pf.output, "Selection file path (stdout when omitted)");
    prune->add_flag("--timing", pf.timing, "Record pruning wall time (output is then not byte-stable)");
    prune->add_option("--flop-linear", pf.flop_linear, "Linear cost coefficient per token");
    prune->add_option("--flop-quadratic", pf.flop_quadratic, "Quadratic cost coefficient per token pair");

    SweepFlags sf;
    auto* sweep = app.add_subcommand(
        "sweep", "Compare strategies across budgets. CSV columns: strategy, ratio (empty for explicit "
                 "budgets), budget (first frame), frames, importance_mass (retained share of base importance, "
                 "mean over frames), coverage (mean best cosine of dropped tokens to the retained set, mean "
                 "over frames)");
    sweep->add_option("--input", sf.input, "Token dump")->required();
    sweep->add_option("--ratios", sf.ratios, "Comma-separated pruning ratios")->delimiter(',')->capture_default_str();
    sweep->add_option("--budgets", sf.budgets, "Comma-separated explicit budgets")->delimiter(',');
    sweep->add_option("--strategies", sf.strategies, "Comma-separated strategies")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--epsilon", sf.epsilon, "Normalization epsilon");
    sweep->add_option("--output", sf.output, "CSV path (stdout when omitted)");

    BenchFlags bf;
    auto* bench = app.add_subcommand("bench", "Time the pruning stage on a synthetic frame");
    bench->add_option("--n", bf.options.tokens, "Tokens per frame")->capture_default_str();
    bench->add_option("--dim", bf.options.dim, "Feature width")->capture_default_str();
    auto* bench_budget = bench->add_option("--budget", bf.budget, "Tokens to keep")->capture_default_str();
    auto* bench_ratio = bench->add_option("--ratio", bf.ratio, "Fraction of tokens to drop");
    bench_ratio->excludes(bench_budget);
    bench->add_option("--iters", bf.options.iters, "Timed repetitions")->capture_default_str();
    bench->add_option("--warmup", bf.options.warmup, "Untimed warm-up repetitions")->capture_default_str();
    bench->add_option("--strategies", bf.strategies, "Comma-separated strategies")->delimiter(',');
    bench->add_option("--seed", bf.options.seed, "Synthetic frame seed")->capture_default_str();
    bench->add_flag("--json", bf.json, "Emit JSON instead of a table");

    GenFlags gf;
    auto* gen = app.add_subcommand("gen", "Write a seeded synthetic episode dump plus cluster metadata");
    gen->add_option("--frames", gf.spec.frames, "Frame count")->capture_default_str();
    gen->add_option("--n", gf.spec.tokens, "Tokens per frame")->capture_default_str();
    gen->add_option("--dim", gf.spec.dim, "Feature width")->capture_default_str();
    gen->add_option("--clusters", gf.spec.clusters, "Cluster count")->capture_default_str();
    gen->add_option("--planted", gf.spec.planted, "High-attention clusters")->capture_default_str();
    gen->add_option("--noise", gf.spec.noise, "Token perturbation norm")->capture_default_str();
    gen->add_option("--seed", gf.spec.seed, "RNG seed")->capture_default_str();
    gen->add_option("--format", gf.format, "binary|text")
        ->check(CLI::IsMember({"binary", "text"}))
        ->capture_default_str();
    gen->add_option("--output", gf.output, "Dump path")->required();
    gen->add_option("--meta", gf.meta, "Metadata path (default <output>.meta.json)");

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << version() << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kFlagError;
    }

    try {
        if (prune->parsed()) {
            return cmd_prune(pf, ratio_opt->count() > 0, budget_opt->count() > 0, out, err);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sf, out, err);
        }
        if (bench->parsed()) {
            return cmd_bench(bf, bench_ratio->count() > 0, out, err);
        }
        if (gen->parsed()) {
            return cmd_gen(gf, err);
        }
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kFailure;
    }
    return kFlagError;
}

}  // namespace stprune::cli
