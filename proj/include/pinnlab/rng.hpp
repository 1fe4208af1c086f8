#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace pinnlab {

/// Deterministic random source.
///
/// The raw stream is std::mt19937_64 (bit-exact across implementations by
/// standard), but all distributions are implemented here by hand: libstdc++
/// and libc++ are free to (and do) produce different sequences from
/// std::normal_distribution and friends, which would break cross-toolchain
/// reproducibility of run histories.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double strictly inside (0, 1); used where an exact 0 or 1
    /// would land a sample on a stratum or domain boundary.
    double uniform_open() {
        // 32-bit grid offset by half a cell: min 2^-33, max 1 - 2^-33.
        // For stratified sampling, (k + u)/n with integer k < 2^15 then
        // stays strictly inside its stratum after rounding.
        const auto hi = static_cast<double>(engine_() >> 32);
        return (hi + 0.5) * 0x1.0p-32;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; caches the second variate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [0, n) by rejection; unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    /// Fisher-Yates shuffle (identical order on every platform).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    /// Random permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        shuffle(p);
        return p;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Deterministic sub-stream derivation: one master seed fans out to
/// independent streams for init / sampling / shuffling without overlap.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 finalizer over (master, stream); good avalanche behaviour.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace pinnlab
