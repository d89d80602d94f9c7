// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace stprune {

inline constexpr std::string_view kVersion = "0.1.0";

std::string_view version() noexcept;

}  // namespace stprune
