#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace manet {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Seed for replication i of a batch keyed by a base seed. Replication 0
/// reuses the base seed so a single-replication batch equals a plain run.
inline uint64_t derive_seed(uint64_t base, uint64_t replication) {
    if (replication == 0) return base;
    return splitmix64(base ^ (0x9e3779b97f4a7c15ull * replication));
}

/// Deterministic random source. All distributions are generated inline from
/// mt19937_64 output (whose sequence the standard pins down exactly), so a
/// seed produces the same stream on every platform; the std::*_distribution
/// adaptors are avoided because their algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). Lemire multiply-shift; the O(n/2^64) bias
    /// is far below anything the statistical tests can resolve.
    uint64_t bounded(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(eng_()) * n) >> 64);
    }

    /// Standard normal via the basic Box-Muller transform. One value per
    /// pair of uniforms, no cached state, fully reproducible per seed.
    double gaussian() {
        double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace manet
