// SPDX-License-Identifier: Apache-2.0

#include "stprune/selector.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "stprune/error.hpp"
#include "stprune/similarity.hpp"

namespace stprune {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_inputs(std::size_t n, std::size_t base_len, std::size_t k) {
    if (n == 0) {
        throw Error(ErrorCode::invalid_argument, "selection needs at least one token");
    }
    if (base_len != n) {
        throw Error(ErrorCode::length_mismatch, "importance length differs from token count");
    }
    if (k == 0) {
        throw Error(ErrorCode::invalid_argument, "budget must be positive");
    }
}

// Dense form: refreshes every candidate's running max-similarity with one
// similarity column per pick. Used when some weight is negative, where the
// lazy bound below does not hold.
SelectionResult greedy_dense(const Matrix& features, std::span<const double> weights, std::size_t k, Strategy tag) {
    const std::size_t n = features.rows();
    const std::size_t picks = std::min(k, n);
    const SimilarityKernel kernel(features);

    SelectionResult out;
    out.strategy = tag;
    out.budget = k;

    std::vector<double> max_sim(n, kNegInf);
    std::vector<double> column(n);
    std::vector<char> taken(n, 0);

    for (std::size_t step = 0; step < picks; ++step) {
        std::size_t best = n;
        double best_score = kNegInf;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) {
                continue;
            }
            const double distinctness = step == 0 ? 1.0 : 1.0 - max_sim[i];
            const double score = weights.empty() ? distinctness : weights[i] * distinctness;
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        taken[best] = 1;
        out.indices.push_back(best);
        out.step_scores.push_back(best_score);

        if (step + 1 < picks) {
            kernel.similarity_to_row(best, column);
            for (std::size_t i = 0; i < n; ++i) {
                max_sim[i] = std::max(max_sim[i], column[i]);
            }
        }
    }
    return out;
}

// Lazy form of the same greedy loop. Once S is non-empty a candidate's score
// only falls as S grows (for non-negative weights), so its last computed score
// bounds the current one. The empty-set step is not covered: 1 - cos exceeds 1
// for negative cosines. So the first pick is made directly and every score is
// computed exactly against it; after that candidates sit in a heap ordered by
// (bound desc, index asc) and only the top is brought up to date, by folding in
// the picks it has not seen. A top that is already current beats every bound
// below it, ties included, so picks and scores match greedy_dense exactly.
SelectionResult greedy_distinct(const Matrix& features, std::span<const double> weights, std::size_t k,
                                Strategy tag) {
    if (std::ranges::any_of(weights, [](double w) { return w < 0.0; })) {
        return greedy_dense(features, weights, k, tag);
    }
    const std::size_t n = features.rows();
    const std::size_t picks = std::min(k, n);
    const auto weight = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

    SelectionResult out;
    out.strategy = tag;
    out.budget = k;
    out.indices.reserve(picks);
    out.step_scores.reserve(picks);

    std::size_t first = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (weight(i) > weight(first)) {
            first = i;
        }
    }
    out.indices.push_back(first);
    out.step_scores.push_back(weight(first));
    if (picks == 1) {
        return out;
    }

    const auto norms = row_norms(features);
    std::vector<double> max_sim(n);
    dot_rows(features, features.row(first), max_sim);
    for (std::size_t i = 0; i < n; ++i) {
        max_sim[i] = cosine_from_parts(max_sim[i], norms[i], norms[first]);
    }
    std::vector<std::size_t> seen(n, 1);  // picks already folded into max_sim

    struct Entry {
        double bound;
        std::size_t index;
    };
    // std heap is a max-heap on "less"; lower index must rank higher on ties.
    auto less = [](const Entry& a, const Entry& b) {
        return a.bound < b.bound || (a.bound == b.bound && a.index > b.index);
    };
    std::vector<Entry> heap;
    heap.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i != first) {
            heap.push_back({weight(i) * (1.0 - max_sim[i]), i});
        }
    }
    std::ranges::make_heap(heap, less);

    while (out.indices.size() < picks) {
        std::ranges::pop_heap(heap, less);
        const Entry top = heap.back();
        heap.pop_back();
        const std::size_t i = top.index;
        if (seen[i] == out.indices.size()) {
            out.indices.push_back(i);
            out.step_scores.push_back(top.bound);
            continue;
        }
        const auto row = features.row(i);
        for (std::size_t p = seen[i]; p < out.indices.size(); ++p) {
            const std::size_t j = out.indices[p];
            max_sim[i] = std::max(max_sim[i], cosine_from_parts(dot(row, features.row(j)), norms[i], norms[j]));
        }
        seen[i] = out.indices.size();
        heap.push_back({weight(i) * (1.0 - max_sim[i]), i});
        std::ranges::push_heap(heap, less);
    }
    return out;
}

SelectionResult ranked_topk(std::span<const double> base, std::size_t k, Strategy tag) {
    check_inputs(base.size(), base.size(), k);
    std::vector<std::size_t> order(base.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return base[a] > base[b]; });
    order.resize(std::min(k, base.size()));

    SelectionResult out;
    out.strategy = tag;
    out.budget = k;
    out.step_scores.reserve(order.size());
    for (auto i : order) {
        out.step_scores.push_back(base[i]);
    }
    out.indices = std::move(order);
    return out;
}

}  // namespace

SelectionResult amm_select(const Matrix& features, std::span<const double> base, std::size_t k) {
    check_inputs(features.rows(), base.size(), k);
    return greedy_distinct(features, base, k, Strategy::amm);
}

SelectionResult amm_select(const TokenSet& tokens, std::span<const double> base, std::size_t k) {
    return amm_select(tokens.features, base, k);
}

SelectionResult amm_oracle(const Matrix& features, std::span<const double> base, std::size_t k) {
    check_inputs(features.rows(), base.size(), k);
    const std::size_t n = features.rows();
    const std::size_t picks = std::min(k, n);

    SelectionResult out;
    out.strategy = Strategy::amm;
    out.budget = k;

    for (std::size_t step = 0; step < picks; ++step) {
        std::size_t best = n;
        double best_score = kNegInf;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::ranges::find(out.indices, i) != out.indices.end()) {
                continue;
            }
            double distinctness = 1.0;
            if (!out.indices.empty()) {
                double nearest = kNegInf;
                for (auto j : out.indices) {
                    nearest = std::max(nearest, cosine(features.row(i), features.row(j)));
                }
                distinctness = 1.0 - nearest;
            }
            const double score = base[i] * distinctness;
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        out.indices.push_back(best);
        out.step_scores.push_back(best_score);
    }
    return out;
}

SelectionResult amm_oracle(const TokenSet& tokens, std::span<const double> base, std::size_t k) {
    return amm_oracle(tokens.features, base, k);
}

SelectionResult diversity_only_select(const Matrix& features, std::size_t k) {
    check_inputs(features.rows(), features.rows(), k);
    return greedy_distinct(features, {}, k, Strategy::diversity_only);
}

SelectionResult semantics_only_select(std::span<const double> base, std::size_t k) {
    return ranked_topk(base, k, Strategy::semantics_only);
}

SelectionResult topk_baseline(std::span<const double> base, std::size_t k) {
    return ranked_topk(base, k, Strategy::topk);
}

SelectionResult maxmin_baseline(const Matrix& features, std::size_t k) {
    check_inputs(features.rows(), features.rows(), k);
    // min_j (1 - cos) == 1 - max_j cos exactly (1 - x rounds monotonically), and
    // with every weight 1 the first pick is index 0: this is the unweighted
    // distinctness greedy.
    return greedy_distinct(features, {}, k, Strategy::maxmin);
}

SelectionResult select_tokens(Strategy strategy, const Matrix& features, std::span<const double> base,
                              std::size_t k) {
    check_inputs(features.rows(), base.size(), k);
    switch (strategy) {
    case Strategy::amm:
        return amm_select(features, base, k);
    case Strategy::diversity_only:
        return diversity_only_select(features, k);
    case Strategy::semantics_only:
        return semantics_only_select(base, k);
    case Strategy::topk:
        return topk_baseline(base, k);
    case Strategy::maxmin:
        return maxmin_baseline(features, k);
    }
    throw Error(ErrorCode::invalid_argument, "unknown strategy");
}

}  // namespace stprune
