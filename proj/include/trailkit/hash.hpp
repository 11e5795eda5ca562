#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace trailkit {

inline constexpr uint64_t kFnvOffset = 14695981039346656037ULL;
inline constexpr uint64_t kFnvPrime = 1099511628211ULL;

/// 64-bit FNV-1a. The one hash used everywhere reproducibility matters:
/// n-gram buckets, prompt fingerprints, screenshot refs, trace checksums.
constexpr uint64_t fnv1a64(std::string_view data, uint64_t seed = kFnvOffset) {
    uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

inline std::string to_hex(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

/// Deterministic splitmix-style mixer for deriving per-task RNG seeds.
constexpr uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL + b;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace trailkit
