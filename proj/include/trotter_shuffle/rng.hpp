#pragma once

#include <cstdint>
#include <random>

namespace trotter_shuffle {

using Rng = std::mt19937_64;

/// Stream tags keep the draws of different consumers of one (seed, n, trial)
/// cell apart.
enum class StreamTag : std::uint32_t {
    permutation = 1,
    generator   = 2,
    block_tail  = 3,
    words       = 4,
    evolution   = 5,
    sampling    = 6,
};

/// Independent stream for the cell (seed, n, trial, tag). Depends on nothing
/// but its arguments, so cells can be evaluated in any order.
inline Rng make_stream(std::uint64_t seed, std::uint64_t n, std::uint64_t trial, StreamTag tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),  static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(n),     static_cast<std::uint32_t>(n >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(tag)};
    return Rng(seq);
}

} // namespace trotter_shuffle
