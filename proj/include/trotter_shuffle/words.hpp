#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "trotter_shuffle/permutation.hpp"
#include "trotter_shuffle/rng.hpp"

namespace trotter_shuffle {

/// A word over a_n letters {0, ..., a_n - 1} in which every letter occurs
/// exactly b_n times.
class Word {
  public:
    Word(std::size_t a_n, std::size_t b_n, std::vector<std::uint32_t> letters);

    /// (0, 1, ..., a_n - 1) repeated b_n times.
    static Word standard(std::size_t a_n, std::size_t b_n);

    std::size_t                       a_n() const { return a_n_; }
    std::size_t                       b_n() const { return b_n_; }
    std::size_t                       size() const { return letters_.size(); }
    const std::vector<std::uint32_t> &letters() const { return letters_; }
    std::uint32_t                     operator[](std::size_t i) const { return letters_[i]; }

    friend bool operator==(const Word &, const Word &) = default;

  private:
    std::size_t                a_n_;
    std::size_t                b_n_;
    std::vector<std::uint32_t> letters_;
};

/// Reads A_{sigma(1)}, ..., A_{sigma(n)} on the standard layout (element i
/// carries letter i mod a_n) and keeps only elements with index < a_n b_n.
Word restrict_word(const Permutation &sigma, std::size_t n, std::size_t a_n, std::size_t b_n);

/// counts(i, j) = occurrences of letter i among the first j letters, j = 0..size.
class PrefixCounts {
  public:
    explicit PrefixCounts(const Word &w);
    std::size_t operator()(std::size_t letter, std::size_t j) const { return table_[letter * (length_ + 1) + j]; }
    std::size_t length() const { return length_; }

  private:
    std::size_t              length_;
    std::vector<std::size_t> table_;
};

inline PrefixCounts prefix_counts(const Word &w) { return PrefixCounts(w); }

/// max over prefixes and letter pairs of |w_k[j] - w_l[j]|.
std::size_t prefix_discrepancy(const Word &w);

/// (prefix_discrepancy + 1) / b_n
double tau(const Word &w);

/// Adjacent transpositions taking w to the standard word when the k-th
/// occurrence of each letter is matched with its k-th occurrence in the
/// standard word; equals the inversion count of that matching.
std::uint64_t transposition_distance(const Word &w);

/// The swaps themselves (position p swaps p and p+1), in application order.
std::vector<std::size_t> transposition_sequence(const Word &w);

Word apply_transpositions(const Word &w, const std::vector<std::size_t> &swaps);

/// distance <= n^2 tau(w), checked in integers as distance * b_n <= n^2 (D + 1).
bool within_transposition_bound(const Word &w, std::size_t n);

/// exact: 2 a_n^2 C(2 b_n, ceil(b_n - p sqrt(b_n) + 1)) / C(2 b_n, b_n);
/// otherwise the surrogate 2 a_n^2 e^{-p^2}. Requires p sqrt(b_n) <= b_n + 1.
double tau_tail_bound(std::size_t a_n, std::size_t b_n, double p, bool exact);

/// Uniformly shuffled standard multiset, one stream per trial.
Word random_word(std::size_t a_n, std::size_t b_n, Rng &rng);

/// Fraction of trials with tau(w) > p / sqrt(b_n).
double tau_tail_empirical(std::size_t a_n, std::size_t b_n, double p, std::size_t trials, std::uint64_t seed);

} // namespace trotter_shuffle
