#pragma once

#include <cstdint>

namespace bubbledate {

// splitmix64 finalizer; used to derive well-separated seeds from
// (base, index) pairs so parallel replications never share a stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) ^ splitmix64(index * 0xD1B54A32D192ED03ULL + 1));
}

}  // namespace bubbledate
