#pragma once

#include <cstdint>
#include <string_view>

namespace equilab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a; stable across platforms and runs (unlike std::hash).
inline std::uint64_t stable_hash(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) { return splitmix64(seed ^ splitmix64(a)); }

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

/// hash(master_seed, module, op, index)
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view module, std::string_view op,
                                 std::uint64_t index) {
    return derive_seed(derive_seed(derive_seed(master, stable_hash(module)), stable_hash(op)), index);
}

}  // namespace equilab
