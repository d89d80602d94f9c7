// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stprune/matrix.hpp"

namespace stprune {

/// What cosine does when either operand has zero norm.
enum class ZeroNormPolicy {
    neutral,  ///< cosine is 0
    error,    ///< throw Error(zero_vector)
};

// All reductions below run strictly left to right over the feature axis with a
// double accumulator. Every float*float product is exact in double, so any two
// code paths that sum the same products in the same order agree bit for bit.

double dot(std::span<const float> a, std::span<const float> b) noexcept;
double l2_norm(std::span<const float> a) noexcept;

/// Combines a dot product with both norms, applying the zero-norm policy and
/// the [-1, 1] clamp. Shared by every cosine path.
double cosine_from_parts(double dot_value, double norm_a, double norm_b,
                         ZeroNormPolicy policy = ZeroNormPolicy::neutral);

double cosine(std::span<const float> a, std::span<const float> b,
              ZeroNormPolicy policy = ZeroNormPolicy::neutral);

std::vector<double> row_norms(const Matrix& m);

/// out[i] = dot(m.row(i), v), bit-identical to calling dot() per row.
void dot_rows(const Matrix& m, std::span<const float> v, std::span<double> out);

/// Dense M x K table of doubles.
class SimilarityMatrix {
public:
    SimilarityMatrix(std::size_t rows, std::size_t cols) : m_rows(rows), m_cols(cols), m_values(rows * cols) {}

    std::size_t rows() const noexcept { return m_rows; }
    std::size_t cols() const noexcept { return m_cols; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_values[i * m_cols + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return m_values[i * m_cols + j]; }

private:
    std::size_t m_rows;
    std::size_t m_cols;
    std::vector<double> m_values;
};

/// out(i, j) = cosine(a_i, b_j). Throws Error(shape_mismatch) when the
/// column counts differ.
SimilarityMatrix cosine_matrix(const Matrix& a, const Matrix& b,
                               ZeroNormPolicy policy = ZeroNormPolicy::neutral);

/// Column-major copy of a feature matrix with cached row norms. Computes the
/// cosine of every row against one probe vector in O(N*D), vectorized across
/// rows so each per-row sum keeps its sequential order.
class SimilarityKernel {
public:
    explicit SimilarityKernel(const Matrix& features);

    std::size_t size() const noexcept { return m_rows; }
    std::size_t dim() const noexcept { return m_cols; }
    std::span<const double> norms() const noexcept { return m_norms; }

    /// out[i] = cosine(row_i, probe); out.size() must equal size().
    void similarity_to(std::span<const float> probe, std::span<double> out) const;

    /// out[i] = cosine(row_i, row_j).
    void similarity_to_row(std::size_t j, std::span<double> out) const;

private:
    void accumulate_dots(std::span<const float> probe, std::span<double> out) const;

    std::size_t m_rows;
    std::size_t m_cols;
    std::vector<float> m_columns;  // m_cols x m_rows
    std::vector<float> m_row_major;
    std::vector<double> m_norms;
};

}  // namespace stprune
