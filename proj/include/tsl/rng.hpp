#pragma once

#include <cstdint>
#include <vector>

#include "tsl/numbers.hpp"

namespace tsl {

/// SplitMix64. All randomness in the project flows through this so that
/// identical seeds give byte-identical results on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    /// Uniform in [lo, hi] inclusive.
    int range(int lo, int hi) {
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (next() & 1u) != 0; }

    /// Random rational p/q with 1 <= q <= max_den, |p| <= q (value in [-1, 1]), p != 0.
    Rational nonzero_unit_rational(int max_den) {
        int q = range(1, max_den);
        int p = range(1, q);
        return coin() ? Rational(p, q) : Rational(-p, q);
    }

    /// Random subset of {0, ..., n-1} with exactly k elements, sorted.
    std::vector<int> subset(int n, int k) {
        std::vector<int> pool(n);
        for (int i = 0; i < n; ++i) pool[i] = i;
        for (int i = 0; i < k; ++i) {
            int j = range(i, n - 1);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

private:
    std::uint64_t state_;
};

}  // namespace tsl
