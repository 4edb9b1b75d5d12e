#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace rigidnet {

// Draws are produced in fixed-size chunks; chunk c of stream s under seed S
// always yields the same numbers, whatever thread computes it. Reductions
// then combine per-chunk partials in chunk order.
inline constexpr std::size_t kChunkSize = 1u << 14;

enum class Stream : std::uint64_t { Expectation = 0, Campaign = 1, Coverage = 2 };

// Worker count: RIGIDNET_THREADS when set and positive, else the hardware
// concurrency (at least one).
unsigned worker_count();

std::size_t chunk_count(std::size_t num_draws);

std::mt19937_64 chunk_generator(std::uint64_t seed, Stream stream, std::uint64_t chunk);

// Uniform on (0, 1]; built from the top 53 bits so it is identical on every
// standard library.
inline double uniform_open0(std::mt19937_64& gen) {
    return 1.0 - static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Runs body(c) for c in [0, num_chunks) on up to worker_count() threads.
// body must only write to per-chunk storage.
void parallel_chunks(std::size_t num_chunks, const std::function<void(std::size_t)>& body);

}  // namespace rigidnet
