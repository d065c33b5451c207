#pragma once

// Seeded counter-based pseudorandom generator.
//
// The generator is SplitMix64 (Steele, Lea, Flood; as popularized by
// Vigna's reference implementation): the k-th output for seed s is
//
//     mix64(s + k * 0x9E3779B97F4A7C15)
//
//     mix64(z): z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//               z ^= z >> 27;  z *= 0x94D049BB133111EB;
//               z ^= z >> 31;  return z;
//
// Test vectors (seed 0): e220a8397b1dcdaf, 6e789e6aa1b965f4,
// 06c45d188009454f (pinned in tests/test_rng.cpp).  Being a pure counter
// scheme, the sequence is reproducible across platforms and languages.
// Derived streams use child(seed, index) below, also pinned by tests.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hashlab {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Unbiased value in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("below(0)");
        std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Sorted uniformly random k-subset of {0, ..., n-1} (partial Fisher-Yates).
    std::vector<std::uint32_t> subset(std::uint32_t n, std::uint32_t k) {
        if (k > n) throw std::invalid_argument("subset: k > n");
        std::vector<std::uint32_t> pool(n);
        for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
        for (std::uint32_t i = 0; i < k; ++i) {
            std::uint64_t j = i + below(n - i);
            std::swap(pool[i], pool[j]);
        }
        std::vector<std::uint32_t> out(pool.begin(), pool.begin() + k);
        std::sort(out.begin(), out.end());
        return out;
    }

  private:
    std::uint64_t state_;
};

// Deterministic derived seed for stream `index` of a master seed.
inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + kGolden));
}

}  // namespace hashlab
