// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "stprune/matrix.hpp"
#include "stprune/token_set.hpp"

namespace stprune::testing {

struct Instance {
    Matrix features;
    std::vector<double> base;
    std::size_t k = 1;
};

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    Matrix m(rows, cols);
    for (auto& x : m.data()) {
        x = gauss(rng);
    }
    return m;
}

inline std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return v;
}

/// N in [min_n, max_n], D in [2, max_d], k in [1, min(max_k, N)].
inline Instance random_instance(std::uint64_t seed, std::size_t min_n = 2, std::size_t max_n = 64,
                                std::size_t max_d = 16, std::size_t max_k = 16) {
    std::mt19937_64 rng(seed);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(min_n, max_n)(rng);
    const std::size_t d = std::uniform_int_distribution<std::size_t>(2, max_d)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min(max_k, n))(rng);
    Instance inst;
    inst.features = random_matrix(rng, n, d);
    inst.base = random_unit_vector(rng, n);
    inst.k = k;
    return inst;
}

inline TokenSet random_tokens(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    TokenSet t;
    t.features = random_matrix(rng, n, d);
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    t.cls.resize(d);
    for (auto& x : t.cls) {
        x = gauss(rng);
    }
    return t;
}

/// Exact power of two in [2^-lo, 2^hi]; float scaling by it is lossless.
inline float power_of_two(std::mt19937_64& rng, int lo = 6, int hi = 6) {
    const int e = std::uniform_int_distribution<int>(-lo, hi)(rng);
    return std::ldexp(1.0f, e);
}

}  // namespace stprune::testing
