// SPDX-License-Identifier: Apache-2.0

#include "stprune/error.hpp"

namespace stprune {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::zero_vector:
        return "ZeroVector";
    case ErrorCode::shape_mismatch:
        return "ShapeMismatch";
    case ErrorCode::length_mismatch:
        return "LengthMismatch";
    case ErrorCode::domain_error:
        return "DomainError";
    case ErrorCode::dimension_mismatch:
        return "DimensionMismatch";
    case ErrorCode::empty_selection:
        return "EmptySelection";
    case ErrorCode::malformed_dump:
        return "MalformedDump";
    case ErrorCode::invalid_argument:
        return "InvalidArgument";
    case ErrorCode::io_error:
        return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), m_code(code) {}

}  // namespace stprune
