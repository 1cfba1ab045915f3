#include "trotter_shuffle/words.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "trotter_shuffle/errors.hpp"

namespace trotter_shuffle {

Word::Word(std::size_t a_n, std::size_t b_n, std::vector<std::uint32_t> letters) : a_n_(a_n), b_n_(b_n), letters_(std::move(letters)) {
    if(a_n_ < 1 || b_n_ < 1) throw InvalidInput("Word: a_n and b_n must be positive");
    if(letters_.size() != a_n_ * b_n_) throw InvalidInput("Word: length must be a_n * b_n");
    std::vector<std::size_t> count(a_n_, 0);
    for(auto l : letters_) {
        if(l >= a_n_) throw InvalidInput("Word: letter out of range");
        ++count[l];
    }
    for(auto c : count)
        if(c != b_n_) throw InvalidInput("Word: every letter must occur exactly b_n times");
}

Word Word::standard(std::size_t a_n, std::size_t b_n) {
    std::vector<std::uint32_t> letters(a_n * b_n);
    for(std::size_t i = 0; i < letters.size(); ++i) letters[i] = static_cast<std::uint32_t>(i % a_n);
    return Word(a_n, b_n, std::move(letters));
}

Word restrict_word(const Permutation &sigma, std::size_t n, std::size_t a_n, std::size_t b_n) {
    if(sigma.n() != n) throw DimensionMismatch("restrict_word: permutation size differs from n");
    if(a_n * b_n > n) throw InvalidInput("restrict_word: a_n * b_n = " + std::to_string(a_n * b_n) + " exceeds n = " + std::to_string(n));
    const std::size_t          covered = a_n * b_n;
    std::vector<std::uint32_t> letters;
    letters.reserve(covered);
    for(std::size_t i = 0; i < n; ++i)
        if(sigma[i] < covered) letters.push_back(static_cast<std::uint32_t>(sigma[i] % a_n));
    return Word(a_n, b_n, std::move(letters));
}

PrefixCounts::PrefixCounts(const Word &w) : length_(w.size()), table_(w.a_n() * (w.size() + 1), 0) {
    for(std::size_t letter = 0; letter < w.a_n(); ++letter) {
        std::size_t *row = &table_[letter * (length_ + 1)];
        for(std::size_t j = 1; j <= length_; ++j) row[j] = row[j - 1] + (w[j - 1] == letter);
    }
}

std::size_t prefix_discrepancy(const Word &w) {
    std::vector<std::size_t> count(w.a_n(), 0);
    std::size_t              worst = 0;
    for(auto l : w.letters()) {
        ++count[l];
        const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
        worst               = std::max(worst, *hi - *lo);
    }
    return worst;
}

double tau(const Word &w) { return static_cast<double>(prefix_discrepancy(w) + 1) / static_cast<double>(w.b_n()); }

namespace {

    /// Position of each letter of w in the standard word under the occurrence matching.
    std::vector<std::size_t> matched_targets(const Word &w) {
        std::vector<std::size_t> seen(w.a_n(), 0);
        std::vector<std::size_t> target(w.size());
        for(std::size_t i = 0; i < w.size(); ++i) {
            const auto l = w[i];
            target[i]    = seen[l]++ * w.a_n() + l;
        }
        return target;
    }

    std::uint64_t count_inversions(std::vector<std::size_t> &v, std::vector<std::size_t> &buf, std::size_t lo, std::size_t hi) {
        if(hi - lo < 2) return 0;
        const std::size_t mid = lo + (hi - lo) / 2;
        std::uint64_t     inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
        std::size_t       i = lo, j = mid, k = lo;
        while(i < mid && j < hi) {
            if(v[j] < v[i]) {
                inv += mid - i;
                buf[k++] = v[j++];
            } else {
                buf[k++] = v[i++];
            }
        }
        while(i < mid) buf[k++] = v[i++];
        while(j < hi) buf[k++] = v[j++];
        std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
                  v.begin() + static_cast<std::ptrdiff_t>(lo));
        return inv;
    }

} // namespace

std::uint64_t transposition_distance(const Word &w) {
    auto                     target = matched_targets(w);
    std::vector<std::size_t> buf(target.size());
    return count_inversions(target, buf, 0, target.size());
}

std::vector<std::size_t> transposition_sequence(const Word &w) {
    auto                     target = matched_targets(w);
    std::vector<std::size_t> swaps;
    for(std::size_t i = 1; i < target.size(); ++i) {
        for(std::size_t j = i; j > 0 && target[j - 1] > target[j]; --j) {
            std::swap(target[j - 1], target[j]);
            swaps.push_back(j - 1);
        }
    }
    return swaps;
}

Word apply_transpositions(const Word &w, const std::vector<std::size_t> &swaps) {
    auto letters = w.letters();
    for(auto p : swaps) {
        if(p + 1 >= letters.size()) throw InvalidInput("apply_transpositions: swap position out of range");
        std::swap(letters[p], letters[p + 1]);
    }
    return Word(w.a_n(), w.b_n(), std::move(letters));
}

bool within_transposition_bound(const Word &w, std::size_t n) {
    if(n < w.size()) throw InvalidInput("within_transposition_bound: n must be at least a_n * b_n");
    const auto lhs = static_cast<unsigned __int128>(transposition_distance(w)) * w.b_n();
    const auto rhs = static_cast<unsigned __int128>(n) * n * (prefix_discrepancy(w) + 1);
    return lhs <= rhs;
}

double tau_tail_bound(std::size_t a_n, std::size_t b_n, double p, bool exact) {
    if(a_n < 1 || b_n < 1) throw InvalidInput("tau_tail_bound: a_n and b_n must be positive");
    if(!(p > 0.0)) throw InvalidInput("tau_tail_bound: p must be positive");
    const double b     = static_cast<double>(b_n);
    const double shift = p * std::sqrt(b);
    if(shift > b + 1.0) throw PreconditionError("tau_tail_bound: requires p sqrt(b_n) <= b_n + 1");
    const double a2 = 2.0 * static_cast<double>(a_n) * static_cast<double>(a_n);
    if(!exact) return a2 * std::exp(-p * p);

    const double m = std::min(std::max(std::ceil(b - shift + 1.0), 0.0), 2.0 * b);
    // log C(2b, m) - log C(2b, b)
    const double log_ratio = 2.0 * std::lgamma(b + 1.0) - std::lgamma(m + 1.0) - std::lgamma(2.0 * b - m + 1.0);
    return std::max(0.0, a2 * std::exp(log_ratio));
}

Word random_word(std::size_t a_n, std::size_t b_n, Rng &rng) {
    const auto standard = Word::standard(a_n, b_n);
    const auto sigma    = uniform_permutation(standard.size(), rng);
    std::vector<std::uint32_t> letters(standard.size());
    for(std::size_t i = 0; i < letters.size(); ++i) letters[i] = standard[sigma[i]];
    return Word(a_n, b_n, std::move(letters));
}

double tau_tail_empirical(std::size_t a_n, std::size_t b_n, double p, std::size_t trials, std::uint64_t seed) {
    if(trials < 1) throw InvalidInput("tau_tail_empirical: trials must be at least 1");
    const double threshold = p / std::sqrt(static_cast<double>(b_n));
    std::size_t  hits      = 0;
    for(std::size_t t = 0; t < trials; ++t) {
        auto rng = make_stream(seed, a_n * b_n, t, StreamTag::words);
        hits += tau(random_word(a_n, b_n, rng)) > threshold;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

} // namespace trotter_shuffle
