// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "stprune/stprune.hpp"
#include "stprune_cli/cli.hpp"

using namespace stprune;
using stprune::testing::random_instance;

namespace {

constexpr double kPointTolerance = 1e-6;
constexpr double kFlopTolerance = 1e-9;
constexpr double kOracleSecondsLimit = 10.0;
constexpr double kBenchMedianLimitUs = 20000.0;
constexpr std::uint64_t kSeeds = 100;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int g_failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) {
        ++g_failures;
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
}

bool near(double a, double b, double tol) {
    return std::abs(a - b) <= tol;
}

Outcome oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    int mismatches = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto inst = random_instance(seed, 2, 64, 16, 16);
        if (amm_select(inst.features, inst.base, inst.k).indices !=
            amm_oracle(inst.features, inst.base, inst.k).indices) {
            ++mismatches;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream s;
    s << "200 instances, " << mismatches << " mismatches, " << secs << " s";
    return {mismatches == 0 && secs < kOracleSecondsLimit, s.str()};
}

Outcome budget_arithmetic() {
    const auto b70 = budget_from_ratio(729, 0.70);
    const auto b90 = budget_from_ratio(729, 0.90);
    PruneConfig explicit_budget;
    explicit_budget.budget = 146;
    const auto b146 = explicit_budget.resolve_budget(729);
    std::ostringstream s;
    s << "729@0.70=" << b70 << " 729@0.90=" << b90 << " explicit=" << b146;
    return {b70 == 218 && b90 == 72 && b146 == 146, s.str()};
}

Outcome point_checks() {
    const std::vector<double> raw{1.0, 3.0, 2.0};
    const auto norm = normalize_importance(raw);
    const bool n_ok = near(norm[0], 0.0, kPointTolerance) && near(norm[1], 0.99999950000025, kPointTolerance) &&
                      near(norm[2], 0.499999750000125, kPointTolerance);

    const std::vector<double> base{0.8};
    const std::vector<double> rel{0.5};
    const double rw = reweight(base, rel, 0.5)[0];
    const bool r_ok = near(rw, 0.6, kPointTolerance);

    // cos(history, query) = -0.5 clamps to 0.
    const Matrix history{{1.0f, 0.0f}};
    QuerySet q;
    q.features = Matrix{{-0.5f, static_cast<float>(std::sqrt(3.0) / 2.0)}};
    q.source_indices = {0};
    const double clamped = st_relevance(history, q)[0];
    const bool c_ok = near(clamped, 0.0, kPointTolerance);

    std::ostringstream s;
    s.precision(17);
    s << "normalize=(" << norm[0] << "," << norm[1] << "," << norm[2] << ") reweight=" << rw << " clamp=" << clamped;
    return {n_ok && r_ok && c_ok, s.str()};
}

Outcome invariance_suite() {
    int scale = 0;
    int affine = 0;
    int neutral = 0;
    int first_pick = 0;
    std::mt19937_64 rng(20261015);
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        // Feature scale: power-of-two factors keep every cosine bit-exact.
        const auto inst = random_instance(10000 + seed);
        auto tokens = stprune::testing::random_tokens(rng, inst.features.rows(), inst.features.cols());
        auto scaled = tokens;
        const float c = stprune::testing::power_of_two(rng);
        for (auto& x : scaled.features.data()) {
            x *= c;
        }
        PruneConfig cfg;
        cfg.budget = inst.k;
        if (prune_frame(tokens, cfg).indices != prune_frame(scaled, cfg).indices) {
            ++scale;
        }

        // Affine ordering: a*raw + b with a > 0 never reverses an order.
        std::uniform_real_distribution<double> ua(0.01, 100.0);
        std::uniform_real_distribution<double> ub(-100.0, 100.0);
        const double a = ua(rng);
        const double b = ub(rng);
        std::vector<double> shifted(inst.base.size());
        for (std::size_t i = 0; i < shifted.size(); ++i) {
            shifted[i] = a * inst.base[i] + b;
        }
        const auto n0 = normalize_importance(inst.base);
        const auto n1 = normalize_importance(shifted);
        for (std::size_t i = 0; i < n0.size(); ++i) {
            for (std::size_t j = 0; j < n0.size(); ++j) {
                if (n0[i] < n0[j] && n1[i] > n1[j]) {
                    ++affine;
                }
            }
        }

        // Constant relevance: queries orthogonal to all history tokens give
        // R = 0 everywhere; alpha = 1 ignores R entirely.
        const std::size_t n = inst.features.rows();
        const std::size_t d = inst.features.cols();
        Matrix padded(n, d + 1, 0.0f);
        for (std::size_t i = 0; i < n; ++i) {
            std::ranges::copy(inst.features.row(i), padded.row(i).begin());
        }
        TokenSet hist;
        hist.features = padded;
        hist.cls.assign(d + 1, 1.0f);
        QuerySet orth;
        orth.features = Matrix(1, d + 1, 0.0f);
        orth.features(0, d) = 1.0f;
        orth.source_indices = {0};
        const auto plain = amm_select(padded, inst.base, inst.k).indices;
        if (prune_history(hist, inst.base, orth, inst.k, 0.5).indices != plain ||
            prune_history(hist, inst.base, QuerySet{stprune::testing::random_matrix(rng, 3, d + 1), {0, 1, 2}},
                          inst.k, 1.0)
                    .indices != plain) {
            ++neutral;
        }

        // First pick is the argmax of importance, lowest index on ties.
        const auto sel = amm_select(inst.features, inst.base, inst.k);
        const auto best = static_cast<std::size_t>(std::ranges::max_element(inst.base) - inst.base.begin());
        if (sel.indices.front() != best || sel.step_scores.front() != inst.base[best]) {
            ++first_pick;
        }
    }
    std::ostringstream s;
    s << kSeeds << " seeds each; violations scale=" << scale << " affine=" << affine << " neutrality=" << neutral
      << " first_pick=" << first_pick;
    return {scale + affine + neutral + first_pick == 0, s.str()};
}

Outcome ablation_direction() {
    constexpr std::size_t kTokens = 120;
    constexpr std::size_t kDim = 32;
    constexpr std::size_t kDuplicates = 24;
    constexpr std::size_t kBudget = 12;
    int coverage_wins = 0;
    int mass_max = 0;
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        const auto frame = synth::duplicate_cluster_frame(kTokens, kDim, kDuplicates, seed);
        const auto base = frame_importance(frame).base;
        const auto amm = select_tokens(Strategy::amm, frame.features, base, kBudget);
        const auto topk = select_tokens(Strategy::topk, frame.features, base, kBudget);
        if (coverage(frame.features, amm.indices) > coverage(frame.features, topk.indices)) {
            ++coverage_wins;
        }
        const double topk_mass = importance_mass(base, topk.indices);
        bool maximal = true;
        for (auto s : {Strategy::amm, Strategy::diversity_only, Strategy::semantics_only, Strategy::maxmin}) {
            if (importance_mass(base, select_tokens(s, frame.features, base, kBudget).indices) > topk_mass) {
                maximal = false;
            }
        }
        mass_max += maximal ? 1 : 0;
    }
    std::ostringstream s;
    s << "amm coverage > topk on " << coverage_wins << "/" << kSeeds << ", topk mass maximal on " << mass_max << "/"
      << kSeeds;
    return {coverage_wins == static_cast<int>(kSeeds) && mass_max == static_cast<int>(kSeeds), s.str()};
}

Outcome flop_estimator() {
    const FlopModel linear{1.0, 0.0};
    const FlopModel quadratic{0.0, 1.0};
    const double lin = estimate_flops(729, 72, linear).ratio;
    const double quad = estimate_flops(729, 72, quadratic).ratio;
    const bool values = near(lin, 72.0 / 729.0, kFlopTolerance) &&
                        near(quad, (72.0 / 729.0) * (72.0 / 729.0), kFlopTolerance);
    bool monotone = true;
    for (const auto& model : {linear, quadratic, FlopModel::transformer(3584)}) {
        double prev = 0.0;
        for (std::size_t kept : {72u, 146u, 218u, 729u}) {
            const double r = estimate_flops(729, kept, model).ratio;
            monotone = monotone && r > prev;
            prev = r;
        }
        monotone = monotone && prev == 1.0;
    }
    std::ostringstream s;
    s.precision(17);
    s << "linear=" << lin << " quadratic=" << quad << " monotone=" << (monotone ? "yes" : "no");
    return {values && monotone, s.str()};
}

Outcome performance_smoke() {
    cli::BenchOptions opts;
    opts.tokens = 729;
    opts.dim = 1152;
    opts.budget = 72;
    opts.iters = 100;
    opts.strategies = {Strategy::amm};
    const auto rows = cli::run_bench(opts);
    std::ostringstream s;
    s << "amm N=729 D=1152 k=72 median=" << rows.front().median_us << " us p95=" << rows.front().p95_us
      << " us (limit " << kBenchMedianLimitUs << " us)";
    return {rows.front().median_us < kBenchMedianLimitUs, s.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "stprune_acceptance";
    std::filesystem::create_directories(dir);
    const auto dump_path = (dir / "episode.tok").string();
    std::ostringstream sink;
    auto run = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "stprune");
        return cli::run(args, sink, sink);
    };
    if (run({"gen", "--frames", "9", "--n", "729", "--dim", "64", "--seed", "3", "--output", dump_path}) != 0) {
        return {false, "gen failed: " + sink.str()};
    }
    const auto a = (dir / "a.json").string();
    const auto b = (dir / "b.json").string();
    for (const auto& out : {a, b}) {
        if (run({"prune", "--input", dump_path, "--ratio", "0.9", "--merge", "--output", out}) != 0) {
            return {false, "prune failed: " + sink.str()};
        }
    }
    const auto first = slurp(a);
    const auto second = slurp(b);
    std::ostringstream s;
    s << "two prune runs, " << first.size() << " bytes, " << (first == second ? "identical" : "different");
    return {!first.empty() && first == second, s.str()};
}

}  // namespace

int main() {
    report("oracle_equivalence", oracle_equivalence);
    report("budget_arithmetic", budget_arithmetic);
    report("point_checks", point_checks);
    report("invariance_suite", invariance_suite);
    report("ablation_direction", ablation_direction);
    report("flop_estimator", flop_estimator);
    report("performance_smoke", performance_smoke);
    report("determinism", determinism);
    return g_failures == 0 ? 0 : 1;
}
