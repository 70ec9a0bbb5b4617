// Seed derivation: every random stream is addressed by (seed, stream id)
// and is independent of thread scheduling.
#pragma once

#include <cstdint>
#include <random>

namespace leadlag {

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream)
{
    return std::mt19937_64(derive_seed(seed, stream));
}

/// Stream ids used by the simulator.
enum StreamId : std::uint64_t { kGaussianStream = 0, kMaskStream1 = 1, kMaskStream2 = 2 };

}  // namespace leadlag
