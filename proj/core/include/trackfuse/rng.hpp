#pragma once

#include <cmath>
#include <cstdint>

namespace trackfuse {

/// splitmix64 step; also usable as a stateless hash of a 64-bit key.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_u64(std::uint64_t key) {
    std::uint64_t s = key;
    return splitmix64(s);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return hash_u64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
}

/// Deterministic, implementation-independent random generator. The standard
/// <random> distributions are implementation-defined, so frozen test values
/// and byte-identical dataset re-runs go through this instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // modulo bias is < 2^-40 for every n used here
        return next_u64() % n;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace trackfuse
