#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace banwave {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt2 = std::numbers::sqrt2;
inline constexpr Complex iu{0.0, 1.0};

/// Fixed-order pairwise summation. Same result for the same input order,
/// regardless of thread count (callers sum fixed chunks sequentially).
template <typename T>
T pairwise_sum(std::span<const T> xs) {
    const std::size_t n = xs.size();
    if (n <= 32) {
        T acc{};
        for (const T& x : xs) acc += x;
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& xs) {
    return pairwise_sum(std::span<const T>(xs));
}

/// Thread cap: BANWAVE_THREADS if set, else hardware concurrency, capped at 8.
inline int thread_cap() {
    if (const char* env = std::getenv("BANWAVE_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
}

/// Runs fn(begin, end) over fixed-size chunks of [0, count). Chunk boundaries
/// do not depend on the thread count, so per-chunk results are reproducible;
/// any reduction over chunk outputs must be done in chunk order by the caller.
template <typename Fn>
void parallel_for_chunks(std::size_t count, std::size_t chunk, Fn&& fn) {
    if (count == 0) return;
    const std::size_t nchunks = (count + chunk - 1) / chunk;
    const int nthreads = std::min<std::size_t>(thread_cap(), nchunks);
    if (nthreads <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c)
            fn(c, c * chunk, std::min(count, (c + 1) * chunk));
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([=, &fn]() {
            for (std::size_t c = t; c < nchunks; c += nthreads)
                fn(c, c * chunk, std::min(count, (c + 1) * chunk));
        });
    }
    for (auto& th : pool) th.join();
}

/// FNV-1a 64-bit digest, used for the hashed section of reports.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace banwave
