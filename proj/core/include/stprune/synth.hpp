// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stprune/token_set.hpp"

namespace stprune::synth {

/// Seeded Gaussian-cluster episodes. Every frame draws its tokens from the
/// same set of unit cluster centers; the CLS vector points at the sum of the
/// planted centers, so planted clusters carry the high attention.
struct EpisodeSpec {
    std::size_t frames = 9;
    std::size_t tokens = 729;
    std::size_t dim = 64;
    std::size_t clusters = 8;
    std::size_t planted = 2;
    double noise = 0.35;      ///< norm of the per-token perturbation
    double cls_noise = 0.05;  ///< norm of the CLS perturbation
    std::uint64_t seed = 0;

    /// Throws Error(invalid_argument) for zero sizes or planted > clusters.
    void validate() const;
};

struct FrameTruth {
    std::vector<std::size_t> cluster_of;  ///< cluster id per token
};

struct SyntheticEpisode {
    std::vector<TokenSet> frames;
    std::vector<FrameTruth> truth;
    std::vector<std::size_t> planted_clusters;
};

SyntheticEpisode generate_episode(const EpisodeSpec& spec);

/// One frame with `duplicates` near-identical tokens aligned with CLS (high
/// importance, mutually redundant) and the rest spread over random
/// directions. Duplicates occupy the leading indices.
TokenSet duplicate_cluster_frame(std::size_t tokens, std::size_t dim, std::size_t duplicates, std::uint64_t seed);

/// Uniform random frame, features and CLS i.i.d. standard normal.
TokenSet random_frame(std::size_t tokens, std::size_t dim, std::uint64_t seed);

}  // namespace stprune::synth
