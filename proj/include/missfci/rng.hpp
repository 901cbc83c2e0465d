#pragma once

#include <cstdint>
#include <random>

namespace missfci {

/// All stochastic code in the project draws from this generator.
using Rng = std::mt19937_64;

/// splitmix64 step; used to derive independent per-replicate streams from a
/// master seed without overlapping state.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace missfci
