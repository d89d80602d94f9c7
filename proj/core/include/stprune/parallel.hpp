// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace stprune {

/// Resolves a requested worker count: 0 means hardware concurrency, and the
/// result never exceeds `tasks` or drops below 1.
std::size_t resolve_threads(std::size_t requested, std::size_t tasks);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Callers write
/// into per-index slots, so results do not depend on scheduling. The
/// exception from the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace stprune
