// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace stprune {

/// Dense row-major float32 matrix. Rows are token feature vectors.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, float fill = 0.0f);
    Matrix(std::size_t rows, std::size_t cols, std::vector<float> data);
    Matrix(std::initializer_list<std::initializer_list<float>> rows);

    std::size_t rows() const noexcept { return m_rows; }
    std::size_t cols() const noexcept { return m_cols; }
    bool empty() const noexcept { return m_rows == 0; }

    std::span<const float> row(std::size_t i) const noexcept {
        return {m_data.data() + i * m_cols, m_cols};
    }
    std::span<float> row(std::size_t i) noexcept { return {m_data.data() + i * m_cols, m_cols}; }

    float operator()(std::size_t r, std::size_t c) const noexcept { return m_data[r * m_cols + c]; }
    float& operator()(std::size_t r, std::size_t c) noexcept { return m_data[r * m_cols + c]; }

    std::span<const float> data() const noexcept { return m_data; }
    std::span<float> data() noexcept { return m_data; }

    /// Copies the given rows, in order, into a new matrix.
    Matrix gather(std::span<const std::size_t> indices) const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t m_rows = 0;
    std::size_t m_cols = 0;
    std::vector<float> m_data;
};

}  // namespace stprune
