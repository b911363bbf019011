#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qst {

/// Splits [0, count) into fixed blocks of `block` items and runs
/// fn(block_index, begin, end) over them on `threads` workers. The block
/// layout never depends on the thread count, so callers that write results
/// per block and reduce in block order get identical output for any count.
template <typename Fn>
void parallel_blocks(std::int64_t count, std::int64_t block, int threads, Fn&& fn) {
    if (count <= 0) return;
    const std::int64_t blocks = (count + block - 1) / block;
    threads = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::int64_t>(blocks, 1024))));
    auto run = [&](std::int64_t b) {
        const std::int64_t begin = b * block;
        fn(b, begin, std::min(count, begin + block));
    };
    if (threads == 1) {
        for (std::int64_t b = 0; b < blocks; ++b) run(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::int64_t b = next++; b < blocks; b = next++) run(b);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = blocks;
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

int default_thread_count();

}  // namespace qst
