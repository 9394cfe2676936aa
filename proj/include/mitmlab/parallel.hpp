#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

namespace mitmlab {

/// Runs task(b) for b in [0, count) over `workers` threads. The first
/// exception thrown by any task is rethrown on the calling thread.
template <class Task>
void parallel_for(std::int64_t count, int workers, Task&& task) {
    workers = std::max(1, workers);
    if (workers == 1 || count <= 1) {
        for (std::int64_t b = 0; b < count; ++b) task(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1);
            if (b >= count) return;
            try {
                task(b);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto n = static_cast<int>(std::min<std::int64_t>(workers, count));
        pool.reserve(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) pool.emplace_back(body);
    }
    if (failure) std::rethrow_exception(failure);
}

/// Maps fn over trial indices; element i of the result is fn(i) regardless
/// of worker count.
template <class Fn>
auto parallel_map(std::int64_t count, int workers, Fn&& fn) {
    using R = std::decay_t<std::invoke_result_t<Fn&, std::int64_t>>;
    std::vector<R> out(static_cast<std::size_t>(count));
    parallel_for(count, workers, [&](std::int64_t i) { out[static_cast<std::size_t>(i)] = fn(i); });
    return out;
}

/// Reduces per-trial contributions into an accumulator with a fixed block
/// layout: trials are grouped into blocks of `block` consecutive indices,
/// each block is folded sequentially, and blocks are merged as a balanced
/// pairwise tree in index order. The result is bit-identical for any worker
/// count. Acc must provide merge(const Acc&).
template <class Acc, class MakeAcc, class Fn>
Acc blocked_reduce(std::int64_t count, int workers, MakeAcc&& make, Fn&& fn, std::int64_t block = 64) {
    const std::int64_t blocks = count == 0 ? 0 : (count + block - 1) / block;
    std::vector<Acc> partial;
    partial.reserve(static_cast<std::size_t>(blocks));
    for (std::int64_t b = 0; b < blocks; ++b) partial.push_back(make());
    parallel_for(blocks, workers, [&](std::int64_t b) {
        Acc& acc = partial[static_cast<std::size_t>(b)];
        const std::int64_t end = std::min(count, (b + 1) * block);
        for (std::int64_t i = b * block; i < end; ++i) fn(i, acc);
    });
    if (partial.empty()) return make();
    while (partial.size() > 1) {
        std::vector<Acc> next;
        next.reserve((partial.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < partial.size(); i += 2) {
            Acc merged = std::move(partial[i]);
            merged.merge(partial[i + 1]);
            next.push_back(std::move(merged));
        }
        if (partial.size() % 2 == 1) next.push_back(std::move(partial.back()));
        partial = std::move(next);
    }
    return std::move(partial.front());
}

}  // namespace mitmlab
