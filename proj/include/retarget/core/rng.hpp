#pragma once

#include <cstdint>
#include <random>

namespace retarget {

// splitmix64 finalizer; used to derive independent stream seeds.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
    return mix64(mix64(seed ^ mix64(a)) ^ mix64(b + 0x517cc1b727220a95ULL));
}

using Rng = std::mt19937_64;

inline float uniform(Rng& rng, float lo, float hi) {
    std::uniform_real_distribution<float> d(lo, hi);
    return d(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive bounds
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
}

inline float gaussian(Rng& rng, float mean = 0.0f, float stddev = 1.0f) {
    std::normal_distribution<float> d(mean, stddev);
    return d(rng);
}

}  // namespace retarget
