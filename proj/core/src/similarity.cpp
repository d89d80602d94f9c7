// SPDX-License-Identifier: Apache-2.0

#include "stprune/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "stprune/error.hpp"

namespace stprune {

double dot(std::span<const float> a, std::span<const float> b) noexcept {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        acc += static_cast<double>(a[d]) * static_cast<double>(b[d]);
    }
    return acc;
}

double l2_norm(std::span<const float> a) noexcept { return std::sqrt(dot(a, a)); }

double cosine_from_parts(double dot_value, double norm_a, double norm_b, ZeroNormPolicy policy) {
    if (norm_a == 0.0 || norm_b == 0.0) {
        if (policy == ZeroNormPolicy::error) {
            throw Error(ErrorCode::zero_vector, "cosine with a zero-norm vector");
        }
        return 0.0;
    }
    return std::clamp(dot_value / (norm_a * norm_b), -1.0, 1.0);
}

double cosine(std::span<const float> a, std::span<const float> b, ZeroNormPolicy policy) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::shape_mismatch, "cosine operands differ in length");
    }
    return cosine_from_parts(dot(a, b), l2_norm(a), l2_norm(b), policy);
}

void dot_rows(const Matrix& m, std::span<const float> v, std::span<double> out) {
    if (v.size() != m.cols()) {
        throw Error(ErrorCode::shape_mismatch, "vector width differs from matrix width");
    }
    if (out.size() != m.rows()) {
        throw Error(ErrorCode::length_mismatch, "output length differs from row count");
    }
    // Four independent chains; each row still sums in feature order.
    const std::size_t d_count = m.cols();
    std::size_t i = 0;
    for (; i + 4 <= m.rows(); i += 4) {
        const float* r0 = m.row(i).data();
        const float* r1 = m.row(i + 1).data();
        const float* r2 = m.row(i + 2).data();
        const float* r3 = m.row(i + 3).data();
        double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
        for (std::size_t d = 0; d < d_count; ++d) {
            const double x = static_cast<double>(v[d]);
            a0 += static_cast<double>(r0[d]) * x;
            a1 += static_cast<double>(r1[d]) * x;
            a2 += static_cast<double>(r2[d]) * x;
            a3 += static_cast<double>(r3[d]) * x;
        }
        out[i] = a0;
        out[i + 1] = a1;
        out[i + 2] = a2;
        out[i + 3] = a3;
    }
    for (; i < m.rows(); ++i) {
        out[i] = dot(m.row(i), v);
    }
}

std::vector<double> row_norms(const Matrix& m) {
    std::vector<double> out(m.rows());
    const std::size_t d_count = m.cols();
    std::size_t i = 0;
    for (; i + 4 <= m.rows(); i += 4) {
        const float* r0 = m.row(i).data();
        const float* r1 = m.row(i + 1).data();
        const float* r2 = m.row(i + 2).data();
        const float* r3 = m.row(i + 3).data();
        double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
        for (std::size_t d = 0; d < d_count; ++d) {
            a0 += static_cast<double>(r0[d]) * static_cast<double>(r0[d]);
            a1 += static_cast<double>(r1[d]) * static_cast<double>(r1[d]);
            a2 += static_cast<double>(r2[d]) * static_cast<double>(r2[d]);
            a3 += static_cast<double>(r3[d]) * static_cast<double>(r3[d]);
        }
        out[i] = std::sqrt(a0);
        out[i + 1] = std::sqrt(a1);
        out[i + 2] = std::sqrt(a2);
        out[i + 3] = std::sqrt(a3);
    }
    for (; i < m.rows(); ++i) {
        out[i] = l2_norm(m.row(i));
    }
    return out;
}

SimilarityMatrix cosine_matrix(const Matrix& a, const Matrix& b, ZeroNormPolicy policy) {
    if (a.cols() != b.cols()) {
        throw Error(ErrorCode::shape_mismatch, "cosine_matrix operands differ in column count");
    }
    const auto norms_a = row_norms(a);
    const auto norms_b = row_norms(b);
    SimilarityMatrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            out(i, j) = cosine_from_parts(dot(a.row(i), b.row(j)), norms_a[i], norms_b[j], policy);
        }
    }
    return out;
}

SimilarityKernel::SimilarityKernel(const Matrix& features)
    : m_rows(features.rows()),
      m_cols(features.cols()),
      m_columns(features.rows() * features.cols()),
      m_row_major(features.data().begin(), features.data().end()),
      m_norms(row_norms(features)) {
    for (std::size_t i = 0; i < m_rows; ++i) {
        const auto r = features.row(i);
        for (std::size_t d = 0; d < m_cols; ++d) {
            m_columns[d * m_rows + i] = r[d];
        }
    }
}

// Lanes run across rows, never across the feature axis, so the per-row sum
// order is identical to dot(). Compiled with fp-contract off (see CMake).
#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__)
__attribute__((target_clones("avx2", "default")))
#endif
static void axpy_columns(const float* columns, std::size_t rows, std::size_t cols, const float* probe,
                         double* out) {
    std::fill(out, out + rows, 0.0);
    for (std::size_t d = 0; d < cols; ++d) {
        const double w = static_cast<double>(probe[d]);
        const float* col = columns + d * rows;
        for (std::size_t i = 0; i < rows; ++i) {
            out[i] += w * static_cast<double>(col[i]);
        }
    }
}

void SimilarityKernel::accumulate_dots(std::span<const float> probe, std::span<double> out) const {
    axpy_columns(m_columns.data(), m_rows, m_cols, probe.data(), out.data());
}

void SimilarityKernel::similarity_to(std::span<const float> probe, std::span<double> out) const {
    if (probe.size() != m_cols) {
        throw Error(ErrorCode::shape_mismatch, "probe width differs from feature width");
    }
    if (out.size() != m_rows) {
        throw Error(ErrorCode::length_mismatch, "output length differs from row count");
    }
    accumulate_dots(probe, out);
    const double probe_norm = l2_norm(probe);
    for (std::size_t i = 0; i < m_rows; ++i) {
        out[i] = cosine_from_parts(out[i], m_norms[i], probe_norm);
    }
}

void SimilarityKernel::similarity_to_row(std::size_t j, std::span<double> out) const {
    if (j >= m_rows) {
        throw Error(ErrorCode::invalid_argument, "row index out of range");
    }
    if (out.size() != m_rows) {
        throw Error(ErrorCode::length_mismatch, "output length differs from row count");
    }
    accumulate_dots({m_row_major.data() + j * m_cols, m_cols}, out);
    for (std::size_t i = 0; i < m_rows; ++i) {
        out[i] = cosine_from_parts(out[i], m_norms[i], m_norms[j]);
    }
}

}  // namespace stprune
