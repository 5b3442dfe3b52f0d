#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace nlc {

// Blocked pairwise summation. Deterministic regardless of thread count
// (fixed block size, blocks combined in index order) and more accurate
// than a naive running sum on long arrays.
inline double block_sum(const double* v, std::size_t count) {
    constexpr std::size_t block = 4096;
    if (count <= block) {
        if (count <= 16) {
            double s = 0.0;
            for (std::size_t i = 0; i < count; ++i) s += v[i];
            return s;
        }
        std::size_t half = count / 2;
        return block_sum(v, half) + block_sum(v + half, count - half);
    }
    double s = 0.0;
    for (std::size_t off = 0; off < count; off += block)
        s += block_sum(v + off, std::min(block, count - off));
    return s;
}

inline double block_sum(const std::vector<double>& v) {
    return block_sum(v.data(), v.size());
}

// Static-partition parallel loop over [0, count). Each index is processed
// exactly once by one worker; no shared mutable state is provided, callers
// write to disjoint slots.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers < 2 || count < 4096) {
        body(0, count);
        return;
    }
    workers = std::min<std::size_t>(workers, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = static_cast<std::size_t>(w) * chunk;
        std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : pool) t.join();
}

// Deterministic uniform deviates, independent of the standard library's
// distribution implementations. splitmix64 state transition.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi) { // inclusive range
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double d = static_cast<double>(m) * sxx - sx * sx;
    return (static_cast<double>(m) * sxy - sx * sy) / d;
}

} // namespace nlc
