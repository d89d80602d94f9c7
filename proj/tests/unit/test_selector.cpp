// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "stprune/error.hpp"
#include "stprune/selector.hpp"

using namespace stprune;
using stprune::testing::random_instance;

namespace {

const Matrix kTwoAlikeOneApart{{1, 0}, {1, 0}, {0, 1}};

bool is_permutation_of_range(const std::vector<std::size_t>& v, std::size_t n) {
    std::vector<std::size_t> sorted(v);
    std::ranges::sort(sorted);
    for (std::size_t i = 0; i < n; ++i) {
        if (sorted.size() != n || sorted[i] != i) {
            return false;
        }
    }
    return true;
}

template <typename F>
void expect_error(ErrorCode code, F&& fn) {
    try {
        fn();
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

}  // namespace

TEST_SUITE("selector") {

TEST_CASE("amm_select hand example") {
    const std::vector<double> base{1.0, 0.9, 0.5};
    const auto sel = amm_select(kTwoAlikeOneApart, base, 2);
    CHECK(sel.indices == std::vector<std::size_t>{0, 2});
    CHECK(sel.step_scores == std::vector<double>{1.0, 0.5});
    CHECK(sel.strategy == Strategy::amm);
    CHECK(sel.budget == 2);
    CHECK(amm_oracle(kTwoAlikeOneApart, base, 2) == sel);
}

TEST_CASE("amm_select with all-zero importance falls back to index order") {
    const std::vector<double> base{0, 0, 0};
    const auto sel = amm_select(kTwoAlikeOneApart, base, 2);
    CHECK(sel.indices == std::vector<std::size_t>{0, 1});
    CHECK(sel.step_scores == std::vector<double>{0, 0});
}

TEST_CASE("amm_select with k >= N selects everything") {
    std::mt19937_64 rng(1);
    const auto m = stprune::testing::random_matrix(rng, 10, 4);
    const auto base = stprune::testing::random_unit_vector(rng, 10);
    for (std::size_t k : {10u, 11u, 100u}) {
        const auto sel = amm_select(m, base, k);
        CHECK(is_permutation_of_range(sel.indices, 10));
        CHECK(sel.budget == k);
    }
}

TEST_CASE("amm_oracle singleton") {
    const Matrix one{{0.3f, -2.0f}};
    const std::vector<double> base{0.0};
    CHECK(amm_oracle(one, base, 1).indices == std::vector<std::size_t>{0});
    CHECK(amm_select(one, base, 1).indices == std::vector<std::size_t>{0});
}

TEST_CASE("amm_select input errors") {
    const std::vector<double> short_base{1.0, 0.5};
    expect_error(ErrorCode::length_mismatch, [&] { (void)amm_select(kTwoAlikeOneApart, short_base, 1); });
    expect_error(ErrorCode::length_mismatch, [&] { (void)amm_oracle(kTwoAlikeOneApart, short_base, 1); });
    const std::vector<double> base{1.0, 0.5, 0.2};
    expect_error(ErrorCode::invalid_argument, [&] { (void)amm_select(kTwoAlikeOneApart, base, 0); });
    expect_error(ErrorCode::invalid_argument, [&] { (void)semantics_only_select(std::vector<double>{}, 1); });
}

TEST_CASE("amm_select matches the oracle on 200 seeded instances") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto inst = random_instance(seed);
        const auto fast = amm_select(inst.features, inst.base, inst.k);
        const auto slow = amm_oracle(inst.features, inst.base, inst.k);
        CAPTURE(seed);
        CHECK(fast.indices == slow.indices);
        CHECK(fast.step_scores == slow.step_scores);
    }
}

TEST_CASE("amm_select matches the oracle with duplicated rows and tied importance") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = random_instance(1000 + static_cast<std::uint64_t>(trial), 4, 40, 6, 12);
        // Copy a few rows and quantize importance to force exact ties.
        for (std::size_t i = 1; i < inst.features.rows(); i += 3) {
            std::ranges::copy(inst.features.row(i - 1), inst.features.row(i).begin());
        }
        for (auto& b : inst.base) {
            b = std::round(b * 4.0) / 4.0;
        }
        CHECK(amm_select(inst.features, inst.base, inst.k) == amm_oracle(inst.features, inst.base, inst.k));
    }
}

TEST_CASE("negative importance still matches the oracle") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto inst = random_instance(5000 + seed);
        for (auto& b : inst.base) {
            b -= 0.5;
        }
        CHECK(amm_select(inst.features, inst.base, inst.k) == amm_oracle(inst.features, inst.base, inst.k));
    }
}

TEST_CASE("first pick is argmax of importance, lowest index on ties") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto inst = random_instance(seed);
        const auto top = static_cast<std::size_t>(std::ranges::max_element(inst.base) - inst.base.begin());
        CHECK(amm_select(inst.features, inst.base, inst.k).indices.front() == top);
    }
    const std::vector<double> tied{0.2, 0.9, 0.9};
    CHECK(amm_select(kTwoAlikeOneApart, tied, 1).indices.front() == 1);
}

TEST_CASE("selection is invariant under positive per-row rescaling") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<float> scale(0.25f, 4.0f);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto inst = random_instance(seed);
        const auto before = amm_select(inst.features, inst.base, inst.k).indices;
        for (std::size_t i = 0; i < inst.features.rows(); ++i) {
            const float s = scale(rng);
            for (auto& x : inst.features.row(i)) {
                x *= s;
            }
        }
        CHECK(amm_select(inst.features, inst.base, inst.k).indices == before);
    }
}

TEST_CASE("identical rows: the more important one is picked first") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = random_instance(700 + static_cast<std::uint64_t>(trial), 4);
        const std::size_t a = 0;
        const std::size_t b = inst.features.rows() - 1;
        std::ranges::copy(inst.features.row(a), inst.features.row(b).begin());
        inst.base[a] = std::max(inst.base[a], inst.base[b]);
        const auto sel = amm_select(inst.features, inst.base, inst.k).indices;
        const auto pos_a = std::ranges::find(sel, a);
        const auto pos_b = std::ranges::find(sel, b);
        if (pos_b != sel.end()) {
            CHECK(pos_a != sel.end());
            CHECK(pos_a < pos_b);
        }
    }
}

TEST_CASE("budget law and distinct indices for every strategy") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto inst = random_instance(seed, 1, 30, 8, 40);
        const std::size_t n = inst.features.rows();
        for (auto s : {Strategy::amm, Strategy::diversity_only, Strategy::semantics_only, Strategy::topk,
                       Strategy::maxmin}) {
            const auto sel = select_tokens(s, inst.features, inst.base, inst.k);
            CHECK(sel.size() == std::min(inst.k, n));
            CHECK(sel.step_scores.size() == sel.size());
            CHECK(sel.strategy == s);
            CHECK(std::set<std::size_t>(sel.indices.begin(), sel.indices.end()).size() == sel.size());
            CHECK(std::ranges::all_of(sel.indices, [&](std::size_t i) { return i < n; }));
        }
    }
}

TEST_CASE("selection is deterministic across runs") {
    const auto inst = random_instance(4242, 60, 64, 16, 16);
    const auto first = amm_select(inst.features, inst.base, inst.k);
    for (int r = 0; r < 5; ++r) {
        CHECK(amm_select(inst.features, inst.base, inst.k) == first);
    }
}

TEST_CASE("diversity_only_select examples") {
    CHECK(diversity_only_select(kTwoAlikeOneApart, 2).indices == std::vector<std::size_t>{0, 2});
    const Matrix same{{1, 2}, {1, 2}, {1, 2}, {1, 2}};
    CHECK(diversity_only_select(same, 3).indices == std::vector<std::size_t>{0, 1, 2});
    CHECK(diversity_only_select(kTwoAlikeOneApart, 1).indices == std::vector<std::size_t>{0});
}

TEST_CASE("diversity_only equals amm with unit importance") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto inst = random_instance(seed);
        const std::vector<double> ones(inst.features.rows(), 1.0);
        CHECK(diversity_only_select(inst.features, inst.k).indices ==
              amm_oracle(inst.features, ones, inst.k).indices);
    }
}

TEST_CASE("semantics_only_select examples") {
    CHECK(semantics_only_select(std::vector<double>{0.1, 0.9, 0.5}, 2).indices == std::vector<std::size_t>{1, 2});
    CHECK(semantics_only_select(std::vector<double>{0.5, 0.5}, 1).indices == std::vector<std::size_t>{0});
    const auto sel = semantics_only_select(std::vector<double>{0.1, 0.9, 0.5}, 2);
    CHECK(sel.step_scores == std::vector<double>{0.9, 0.5});
}

TEST_CASE("semantics_only with k = N is a full descending sort") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto inst = random_instance(seed);
        const std::size_t n = inst.base.size();
        // Independent ordering: selection sort with explicit tie rule.
        std::vector<std::size_t> expected;
        std::vector<char> used(n, 0);
        for (std::size_t step = 0; step < n; ++step) {
            std::size_t best = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (!used[i] && (best == n || inst.base[i] > inst.base[best])) {
                    best = i;
                }
            }
            used[best] = 1;
            expected.push_back(best);
        }
        CHECK(semantics_only_select(inst.base, n).indices == expected);
        const auto tk = topk_baseline(inst.base, n);
        CHECK(tk.indices == expected);
        CHECK(tk.strategy == Strategy::topk);
    }
}

TEST_CASE("maxmin_baseline examples") {
    CHECK(maxmin_baseline(kTwoAlikeOneApart, 2).indices == std::vector<std::size_t>{0, 2});
    const Matrix same{{3, 1}, {3, 1}, {3, 1}};
    CHECK(maxmin_baseline(same, 3).indices == std::vector<std::size_t>{0, 1, 2});
    std::mt19937_64 rng(8);
    const auto m = stprune::testing::random_matrix(rng, 15, 5);
    CHECK(is_permutation_of_range(maxmin_baseline(m, 15).indices, 15));
}

TEST_CASE("maxmin_baseline maximizes the minimum cosine distance greedily") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto inst = random_instance(seed);
        const auto sel = maxmin_baseline(inst.features, inst.k);
        REQUIRE(sel.indices.front() == 0);
        // Re-check each step from scratch with min over (1 - cos).
        std::vector<std::size_t> chosen{0};
        for (std::size_t step = 1; step < sel.size(); ++step) {
            std::size_t best = inst.features.rows();
            double best_score = -1e300;
            for (std::size_t i = 0; i < inst.features.rows(); ++i) {
                if (std::ranges::find(chosen, i) != chosen.end()) {
                    continue;
                }
                double m = 1e300;
                for (auto j : chosen) {
                    m = std::min(m, 1.0 - cosine(inst.features.row(i), inst.features.row(j)));
                }
                if (m > best_score) {
                    best_score = m;
                    best = i;
                }
            }
            CHECK(sel.indices[step] == best);
            CHECK(sel.step_scores[step] == best_score);
            chosen.push_back(best);
        }
    }
}

}  // TEST_SUITE
