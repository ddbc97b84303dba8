#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace slapick {

// Derive an independent stream seed from a master seed and a purpose tag, so
// that e.g. uplink noise, downlink noise and per-model execution noise never
// share a generator. splitmix64 finalizer over an FNV-1a hash of the tag.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull + h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::string_view tag) {
    return std::mt19937_64(mix_seed(seed, tag));
}

// Uniform draw in [0, 1) using the top 53 bits of the generator word.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller. No cached spare: every call consumes
// exactly two generator words, which keeps replay byte-stable.
inline double standard_normal(std::mt19937_64& rng) {
    double u1 = 1.0 - uniform01(rng);  // (0, 1]
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace slapick
