#include "trotter_shuffle/permutation.hpp"

#include <numeric>
#include <utility>

#include "trotter_shuffle/errors.hpp"

namespace trotter_shuffle {

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
    if(map_.empty()) throw InvalidInput("Permutation: n must be at least 1");
    std::vector<bool> seen(map_.size(), false);
    for(auto v : map_) {
        if(v >= map_.size() || seen[v]) throw InvalidInput("Permutation: map is not a bijection");
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::size_t> map(n);
    std::iota(map.begin(), map.end(), std::size_t{0});
    return Permutation(std::move(map));
}

Permutation uniform_permutation(std::size_t n, Rng &rng) {
    if(n == 0) throw InvalidInput("uniform_permutation: n must be at least 1");
    std::vector<std::size_t> map(n);
    std::iota(map.begin(), map.end(), std::size_t{0});
    for(std::size_t i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(map[i], map[pick(rng)]);
    }
    return Permutation(std::move(map));
}

} // namespace trotter_shuffle
