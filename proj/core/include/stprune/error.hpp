// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stprune {

/// Error categories raised by the engine. Values are stable so foreign
/// callers can map them one-to-one.
enum class ErrorCode : int {
    zero_vector = 1,
    shape_mismatch = 2,
    length_mismatch = 3,
    domain_error = 4,
    dimension_mismatch = 5,
    empty_selection = 6,
    malformed_dump = 7,
    invalid_argument = 8,
    io_error = 9,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return m_code; }

private:
    ErrorCode m_code;
};

}  // namespace stprune
