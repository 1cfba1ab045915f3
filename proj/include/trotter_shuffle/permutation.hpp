#pragma once

#include <cstddef>
#include <vector>

#include "trotter_shuffle/rng.hpp"

namespace trotter_shuffle {

/// A bijection of {0, ..., n-1}. Position i of a permuted row holds element map[i].
class Permutation {
  public:
    /// Throws InvalidInput unless map is a bijection.
    explicit Permutation(std::vector<std::size_t> map);
    static Permutation identity(std::size_t n);

    std::size_t                     n() const { return map_.size(); }
    std::size_t                     operator[](std::size_t i) const { return map_[i]; }
    const std::vector<std::size_t> &map() const { return map_; }

    friend bool operator==(const Permutation &, const Permutation &) = default;

  private:
    std::vector<std::size_t> map_;
};

/// Fisher-Yates over the stream: each of the n! permutations is equally likely.
Permutation uniform_permutation(std::size_t n, Rng &rng);

} // namespace trotter_shuffle
