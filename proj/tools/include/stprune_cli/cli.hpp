// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stprune/config.hpp"
#include "stprune/token_set.hpp"

namespace stprune::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,           ///< output could not be written, or an internal error
    kMalformedInput = 2,    ///< unreadable or corrupt dump, invalid generator dimensions
    kFlagError = 3,         ///< conflicting, missing or out-of-range flags
    kDimensionMismatch = 4,
};

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads ST_PRUNE_THREADS (0 = auto). Unset means 1.
std::size_t threads_from_env();

struct BenchOptions {
    std::size_t tokens = 729;
    std::size_t dim = 1152;
    std::optional<std::size_t> budget = 72;
    std::optional<double> ratio;
    std::size_t iters = 100;
    std::size_t warmup = 5;
    std::vector<Strategy> strategies{Strategy::amm};
    std::uint64_t seed = 1;
};

struct BenchRow {
    Strategy strategy = Strategy::amm;
    std::size_t budget = 0;
    std::size_t samples = 0;
    double median_us = 0.0;
    double p95_us = 0.0;
    double min_us = 0.0;
    double tokens_per_second = 0.0;
};

/// Times prune_frame (importance + selection) on one synthetic frame per
/// strategy, single-threaded. Warm-up runs are not recorded.
std::vector<BenchRow> run_bench(const BenchOptions& options);

/// Median and nearest-rank 95th percentile of a sample set.
double median(std::vector<double> samples);
double percentile95(std::vector<double> samples);

struct SweepRow {
    Strategy strategy = Strategy::amm;
    std::optional<double> ratio;  ///< absent for explicit-budget rows
    std::size_t budget = 0;       ///< budget of the first frame
    std::size_t frames = 0;
    double importance_mass = 0.0;  ///< mean over frames
    double coverage = 0.0;         ///< mean over frames
};

/// One row per (strategy, ratio) then per (strategy, budget); every frame is
/// pruned on its own.
std::vector<SweepRow> run_sweep(const std::vector<TokenSet>& frames, const std::vector<Strategy>& strategies,
                                const std::vector<double>& ratios, const std::vector<std::size_t>& budgets,
                                double epsilon = kDefaultEpsilon);

std::string format_sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace stprune::cli
