// SPDX-License-Identifier: Apache-2.0

#include "stprune/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "stprune/error.hpp"

namespace stprune::synth {

namespace {

std::vector<double> gaussian_vector(std::mt19937_64& rng, std::size_t dim, double norm) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(dim);
    double sq = 0.0;
    for (auto& x : v) {
        x = gauss(rng);
        sq += x * x;
    }
    const double scale = sq > 0.0 ? norm / std::sqrt(sq) : 0.0;
    for (auto& x : v) {
        x *= scale;
    }
    return v;
}

}  // namespace

void EpisodeSpec::validate() const {
    if (frames == 0 || tokens == 0 || dim == 0 || clusters == 0) {
        throw Error(ErrorCode::invalid_argument, "frames, tokens, dim and clusters must be positive");
    }
    if (planted == 0 || planted > clusters) {
        throw Error(ErrorCode::invalid_argument, "planted cluster count must lie in [1, clusters]");
    }
    if (!(noise >= 0.0) || !(cls_noise >= 0.0)) {
        throw Error(ErrorCode::invalid_argument, "noise levels must be non-negative");
    }
}

SyntheticEpisode generate_episode(const EpisodeSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    std::vector<std::vector<double>> centers;
    for (std::size_t c = 0; c < spec.clusters; ++c) {
        centers.push_back(gaussian_vector(rng, spec.dim, 1.0));
    }

    SyntheticEpisode out;
    std::vector<std::size_t> ids(spec.clusters);
    for (std::size_t c = 0; c < spec.clusters; ++c) {
        ids[c] = c;
    }
    std::ranges::shuffle(ids, rng);
    out.planted_clusters.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(spec.planted));
    std::ranges::sort(out.planted_clusters);

    std::uniform_int_distribution<std::size_t> pick_cluster(0, spec.clusters - 1);
    for (std::size_t f = 0; f < spec.frames; ++f) {
        TokenSet frame;
        frame.frame_id = f;
        frame.timestamp = f;
        frame.features = Matrix(spec.tokens, spec.dim);
        FrameTruth truth;
        truth.cluster_of.resize(spec.tokens);
        for (std::size_t i = 0; i < spec.tokens; ++i) {
            const std::size_t c = pick_cluster(rng);
            truth.cluster_of[i] = c;
            const auto noise = gaussian_vector(rng, spec.dim, spec.noise);
            auto row = frame.features.row(i);
            for (std::size_t d = 0; d < spec.dim; ++d) {
                row[d] = static_cast<float>(centers[c][d] + noise[d]);
            }
        }
        const auto cls_noise = gaussian_vector(rng, spec.dim, spec.cls_noise);
        frame.cls.assign(spec.dim, 0.0f);
        for (std::size_t d = 0; d < spec.dim; ++d) {
            double v = cls_noise[d];
            for (auto c : out.planted_clusters) {
                v += centers[c][d];
            }
            frame.cls[d] = static_cast<float>(v);
        }
        out.frames.push_back(std::move(frame));
        out.truth.push_back(std::move(truth));
    }
    return out;
}

TokenSet duplicate_cluster_frame(std::size_t tokens, std::size_t dim, std::size_t duplicates, std::uint64_t seed) {
    if (tokens == 0 || dim == 0 || duplicates == 0 || duplicates >= tokens) {
        throw Error(ErrorCode::invalid_argument, "need 0 < duplicates < tokens and dim > 0");
    }
    std::mt19937_64 rng(seed);
    const auto anchor = gaussian_vector(rng, dim, 1.0);
    TokenSet frame;
    frame.features = Matrix(tokens, dim);
    for (std::size_t i = 0; i < tokens; ++i) {
        auto row = frame.features.row(i);
        if (i < duplicates) {
            const auto jitter = gaussian_vector(rng, dim, 1e-3);
            for (std::size_t d = 0; d < dim; ++d) {
                row[d] = static_cast<float>(anchor[d] + jitter[d]);
            }
        } else {
            const auto v = gaussian_vector(rng, dim, 1.0);
            for (std::size_t d = 0; d < dim; ++d) {
                row[d] = static_cast<float>(v[d]);
            }
        }
    }
    const auto tilt = gaussian_vector(rng, dim, 0.1);
    frame.cls.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        frame.cls[d] = static_cast<float>(anchor[d] + tilt[d]);
    }
    return frame;
}

TokenSet random_frame(std::size_t tokens, std::size_t dim, std::uint64_t seed) {
    if (tokens == 0 || dim == 0) {
        throw Error(ErrorCode::invalid_argument, "tokens and dim must be positive");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    TokenSet frame;
    frame.features = Matrix(tokens, dim);
    for (auto& x : frame.features.data()) {
        x = gauss(rng);
    }
    frame.cls.resize(dim);
    for (auto& x : frame.cls) {
        x = gauss(rng);
    }
    return frame;
}

}  // namespace stprune::synth
