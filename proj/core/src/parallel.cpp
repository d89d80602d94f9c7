// SPDX-License-Identifier: Apache-2.0

#include "stprune/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace stprune {

std::size_t resolve_threads(std::size_t requested, std::size_t tasks) {
    std::size_t n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return std::max<std::size_t>(1, std::min(n, tasks));
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) {
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = resolve_threads(threads, count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace stprune
