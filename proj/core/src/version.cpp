// SPDX-License-Identifier: Apache-2.0

#include "stprune/version.hpp"

namespace stprune {

std::string_view version() noexcept { return kVersion; }

}  // namespace stprune
