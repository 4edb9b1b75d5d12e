#include "rigidnet/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rigidnet {

unsigned worker_count() {
    if (const char* env = std::getenv("RIGIDNET_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t chunk_count(std::size_t num_draws) { return (num_draws + kChunkSize - 1) / kChunkSize; }

std::mt19937_64 chunk_generator(std::uint64_t seed, Stream stream, std::uint64_t chunk) {
    const auto s = static_cast<std::uint64_t>(stream);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(chunk),
                      static_cast<std::uint32_t>(chunk >> 32)};
    return std::mt19937_64(seq);
}

void parallel_chunks(std::size_t num_chunks, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), num_chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < num_chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < num_chunks; c = next++) {
                try {
                    body(c);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace rigidnet
