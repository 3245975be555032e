#pragma once

// Deterministic random stream shared by every seeded operation (sampling,
// shuffling, bootstrap resampling). Version tag: "mt64-rej/v1".
//
//   engine   std::mt19937_64 constructed directly from the 64-bit seed
//            (the engine's output sequence is fixed by the C++ standard).
//   below(n) draw r = engine() until r >= (2^64 - n) mod n, return r mod n
//            (rejection sampling, unbiased, one engine call in the common case).
//   shuffle  Fisher-Yates from the back: for i = size-1 .. 1, swap(i, below(i+1)).
//   sample   partial Fisher-Yates from the front over the index vector
//            0..n-1: for i = 0 .. k-1, swap(i, i + below(n-i)); the first k
//            indices are the sample, in draw order.
//
// std::uniform_int_distribution is not used; its output is implementation-defined.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace polyalign {

inline constexpr std::string_view kPrngVersion = "mt64-rej/v1";

class Prng {
public:
    explicit Prng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). n must be positive.
    uint64_t below(uint64_t n) {
        const uint64_t threshold = (0 - n) % n;
        uint64_t r = engine_();
        while (r < threshold) r = engine_();
        return r % n;
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (size_t i = items.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

    /// k distinct indices from [0, n) in draw order. Requires k <= n.
    std::vector<size_t> sample_indices(size_t n, size_t k) {
        std::vector<size_t> idx(n);
        for (size_t i = 0; i < n; ++i) idx[i] = i;
        for (size_t i = 0; i < k; ++i) {
            const size_t j = i + static_cast<size_t>(below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

private:
    std::mt19937_64 engine_;
};

/// Derives a child seed from a parent seed and a label (FNV-1a of the label
/// folded into SplitMix64 of the parent), so per-language streams stay stable
/// when other languages are added to a recipe.
inline uint64_t derive_seed(uint64_t seed, std::string_view label) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    uint64_t z = seed ^ h;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace polyalign
