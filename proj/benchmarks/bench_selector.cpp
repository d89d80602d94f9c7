// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "stprune/stprune.hpp"

using namespace stprune;

namespace {

TokenSet frame(std::size_t n, std::size_t d) {
    return synth::random_frame(n, d, 42);
}

void BM_AmmSelect(benchmark::State& state) {
    const auto tokens = frame(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    const auto base = frame_importance(tokens).base;
    const auto k = static_cast<std::size_t>(state.range(2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(amm_select(tokens.features, base, k));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AmmSelect)->Args({729, 1152, 72})->Args({729, 1152, 218})->Args({256, 256, 32})->Unit(benchmark::kMicrosecond);

void BM_AmmOracle(benchmark::State& state) {
    const auto tokens = frame(static_cast<std::size_t>(state.range(0)), 16);
    const auto base = frame_importance(tokens).base;
    for (auto _ : state) {
        benchmark::DoNotOptimize(amm_oracle(tokens.features, base, 16));
    }
}
BENCHMARK(BM_AmmOracle)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_TopK(benchmark::State& state) {
    const auto tokens = frame(729, 1152);
    const auto base = frame_importance(tokens).base;
    for (auto _ : state) {
        benchmark::DoNotOptimize(topk_baseline(base, 72));
    }
}
BENCHMARK(BM_TopK)->Unit(benchmark::kMicrosecond);

void BM_FrameImportance(benchmark::State& state) {
    const auto tokens = frame(729, 1152);
    for (auto _ : state) {
        benchmark::DoNotOptimize(frame_importance(tokens));
    }
}
BENCHMARK(BM_FrameImportance)->Unit(benchmark::kMicrosecond);

void BM_Relevance(benchmark::State& state) {
    const auto history = frame(729, 1152);
    const auto current = synth::random_frame(729, 1152, 7);
    const auto sel = prune_frame(current, [] {
        PruneConfig c;
        c.budget = 72;
        return c;
    }());
    const auto queries = QuerySet::from_selection(current, sel);
    for (auto _ : state) {
        benchmark::DoNotOptimize(st_relevance(history, queries));
    }
}
BENCHMARK(BM_Relevance)->Unit(benchmark::kMicrosecond);

void BM_PruneEpisode(benchmark::State& state) {
    synth::EpisodeSpec spec;
    spec.frames = static_cast<std::size_t>(state.range(0));
    spec.dim = 256;
    auto ep = synth::generate_episode(spec);
    Episode episode;
    episode.current = ep.frames.back();
    ep.frames.pop_back();
    episode.history = std::move(ep.frames);
    episode.config.ratio = 0.9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(prune_episode(episode));
    }
}
BENCHMARK(BM_PruneEpisode)->Arg(2)->Arg(9)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
