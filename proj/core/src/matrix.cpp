// SPDX-License-Identifier: Apache-2.0

#include "stprune/matrix.hpp"

#include <algorithm>

#include "stprune/error.hpp"

namespace stprune {

Matrix::Matrix(std::size_t rows, std::size_t cols, float fill)
    : m_rows(rows), m_cols(cols), m_data(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : m_rows(rows), m_cols(cols), m_data(std::move(data)) {
    if (m_data.size() != rows * cols) {
        throw Error(ErrorCode::shape_mismatch, "matrix data size does not match rows*cols");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<float>> rows) {
    m_rows = rows.size();
    m_cols = m_rows == 0 ? 0 : rows.begin()->size();
    m_data.reserve(m_rows * m_cols);
    for (const auto& r : rows) {
        if (r.size() != m_cols) {
            throw Error(ErrorCode::shape_mismatch, "ragged matrix initializer");
        }
        m_data.insert(m_data.end(), r.begin(), r.end());
    }
}

Matrix Matrix::gather(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), m_cols);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (indices[r] >= m_rows) {
            throw Error(ErrorCode::invalid_argument, "gather index out of range");
        }
        std::ranges::copy(row(indices[r]), out.row(r).begin());
    }
    return out;
}

}  // namespace stprune
