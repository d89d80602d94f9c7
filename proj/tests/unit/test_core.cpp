// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "stprune/error.hpp"
#include "stprune/importance.hpp"
#include "stprune/similarity.hpp"

using namespace stprune;

namespace {

constexpr double kHalfSqrt2 = 0.7071067811865476;

TokenSet make_tokens(Matrix features, std::vector<float> cls) {
    TokenSet t;
    t.features = std::move(features);
    t.cls = std::move(cls);
    return t;
}

std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) {
            best = i;
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("cls_attention on orthogonal and antiparallel rows") {
    const auto imp = cls_attention(make_tokens({{1, 0}, {0, 1}, {-1, 0}}, {1, 0}));
    REQUIRE(imp.raw.size() == 3);
    CHECK(imp.raw[0] == 1.0);
    CHECK(imp.raw[1] == 0.0);
    CHECK(imp.raw[2] == -1.0);
    CHECK(imp.base.empty());
    CHECK_FALSE(imp.final.has_value());
}

TEST_CASE("cls_attention is scale invariant on a single row") {
    const auto imp = cls_attention(make_tokens({{5, 0}}, {2, 0}));
    CHECK(imp.raw == std::vector<double>{1.0});
}

TEST_CASE("cls_attention at 45 degrees") {
    const auto imp = cls_attention(make_tokens({{1, 0}, {0, 1}}, {1, 1}));
    CHECK(imp.raw[0] == doctest::Approx(kHalfSqrt2).epsilon(1e-15));
    CHECK(imp.raw[1] == doctest::Approx(kHalfSqrt2).epsilon(1e-15));
}

TEST_CASE("zero-norm rows and cls give neutral attention by default") {
    auto imp = cls_attention(make_tokens({{0, 0}, {1, 0}}, {1, 0}));
    CHECK(imp.raw[0] == 0.0);
    CHECK(imp.raw[1] == 1.0);
    imp = cls_attention(make_tokens({{3, 4}}, {0, 0}));
    CHECK(imp.raw[0] == 0.0);
}

TEST_CASE("zero-norm vectors raise under the error policy") {
    const auto tokens = make_tokens({{0, 0}, {1, 0}}, {1, 0});
    try {
        (void)cls_attention(tokens, ZeroNormPolicy::error);
        FAIL("expected ZeroVector");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::zero_vector);
    }
}

TEST_CASE("token set validation") {
    CHECK_THROWS_AS(cls_attention(make_tokens({{1, 0}}, {1, 0, 0})), Error);
    CHECK_THROWS_AS(cls_attention(make_tokens(Matrix(0, 2), {1, 0})), Error);
    CHECK_THROWS_AS(cls_attention(make_tokens({{1, std::numeric_limits<float>::quiet_NaN()}}, {1, 0})), Error);
    CHECK_THROWS_AS(cls_attention(make_tokens({{1, std::numeric_limits<float>::infinity()}}, {1, 0})), Error);
}

TEST_CASE("normalize_importance worked examples") {
    CHECK(normalize_importance(std::vector<double>{0.2, 0.2, 0.2}) == std::vector<double>{0, 0, 0});

    const auto out = normalize_importance(std::vector<double>{1, 3, 2}, 1e-6);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == doctest::Approx(0.99999950000025).epsilon(1e-12));
    CHECK(out[2] == doctest::Approx(0.499999750000125).epsilon(1e-12));
    CHECK(std::abs(out[1] - 0.9999995) < 1e-6);
    CHECK(std::abs(out[2] - 0.4999998) < 1e-6);

    // Shifting the input leaves the output unchanged.
    const auto a = normalize_importance(std::vector<double>{-1, 1}, 1e-6);
    const auto b = normalize_importance(std::vector<double>{0, 2}, 1e-6);
    CHECK(a == b);
    CHECK(a[1] == doctest::Approx(0.99999950000025).epsilon(1e-12));
}

TEST_CASE("normalize_importance rejects bad input") {
    CHECK_THROWS_AS(normalize_importance(std::vector<double>{}), Error);
    CHECK_THROWS_AS(normalize_importance(std::vector<double>{1.0}, 0.0), Error);
    CHECK_THROWS_AS(normalize_importance(std::vector<double>{1.0}, -1.0), Error);
}

TEST_CASE("normalize_importance: affine ordering invariance and argmax law") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    constexpr double eps = 1e-6;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 50)(rng);
        std::vector<double> raw(n);
        for (auto& x : raw) {
            x = u(rng);
        }
        const double c = scale(rng);
        const double d = u(rng);
        std::vector<double> mapped(n);
        for (std::size_t i = 0; i < n; ++i) {
            mapped[i] = c * raw[i] + d;
        }
        const auto a = normalize_importance(raw, eps);
        const auto b = normalize_importance(mapped, eps);
        const auto [lo, hi] = std::ranges::minmax_element(raw);
        const double range = *hi - *lo;
        // Rescaling the range by c moves each output by at most eps*|1 - 1/c|/range.
        const double tol = 8 * std::numeric_limits<double>::epsilon() + eps * std::abs(1.0 - 1.0 / c) / range;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(a[i] >= 0.0);
            CHECK(a[i] < 1.0);
            CHECK(std::abs(a[i] - b[i]) <= tol);
            for (std::size_t j = 0; j < n; ++j) {
                CHECK((raw[i] < raw[j]) == (a[i] < a[j]));
                CHECK((raw[i] < raw[j]) == (b[i] < b[j]));
            }
        }
        CHECK(argmax(a) == argmax(raw));
    }
}

TEST_CASE("cls_attention is exactly invariant under power-of-two rescaling") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto tokens = stprune::testing::random_tokens(rng, 20, 8);
        const auto before = cls_attention(tokens).raw;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const float s = stprune::testing::power_of_two(rng);
            for (auto& x : tokens.features.row(i)) {
                x *= s;
            }
        }
        const float s = stprune::testing::power_of_two(rng);
        for (auto& x : tokens.cls) {
            x *= s;
        }
        CHECK(cls_attention(tokens).raw == before);
    }
}

TEST_CASE("cosine_matrix worked examples") {
    const Matrix eye{{1, 0}, {0, 1}};
    auto m = cosine_matrix(eye, eye);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == 0.0);
    CHECK(m(1, 0) == 0.0);
    CHECK(m(1, 1) == 1.0);

    m = cosine_matrix(Matrix{{3, 0}}, Matrix{{1, 0}});
    CHECK(m(0, 0) == 1.0);

    m = cosine_matrix(Matrix{{1, 1}}, Matrix{{1, 0}, {1, 1}});
    CHECK(m(0, 0) == doctest::Approx(kHalfSqrt2).epsilon(1e-15));
    CHECK(m(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cosine_matrix shape mismatch") {
    try {
        (void)cosine_matrix(Matrix{{1, 0}}, Matrix{{1, 0, 0}});
        FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::shape_mismatch);
    }
}

TEST_CASE("cosine_matrix is symmetric, clamped, and agrees with the column kernel") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = stprune::testing::random_matrix(rng, 12, 7);
        const auto m = cosine_matrix(a, a);
        const SimilarityKernel kernel(a);
        std::vector<double> column(a.rows());
        for (std::size_t j = 0; j < a.rows(); ++j) {
            kernel.similarity_to_row(j, column);
            for (std::size_t i = 0; i < a.rows(); ++i) {
                CHECK(m(i, j) == m(j, i));
                CHECK(m(i, j) >= -1.0);
                CHECK(m(i, j) <= 1.0);
                CHECK(column[i] == m(i, j));
            }
        }
        std::vector<double> dots(a.rows());
        dot_rows(a, a.row(0), dots);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            CHECK(dots[i] == dot(a.row(i), a.row(0)));
        }
    }
}

TEST_CASE("parallel rows clamp to exactly 1") {
    const Matrix a{{0.1f, 0.2f, 0.3f}, {0.2f, 0.4f, 0.6f}};
    const auto m = cosine_matrix(a, a);
    CHECK(m(0, 1) <= 1.0);
    CHECK(m(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

}  // TEST_SUITE
