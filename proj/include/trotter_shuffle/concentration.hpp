#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "trotter_shuffle/arrays.hpp"
#include "trotter_shuffle/trotter.hpp"

namespace trotter_shuffle {

struct TailQuery {
    double       eps = 0.0; // deviation threshold
    double       L   = 0.0; // uniform norm bound on the summands
    double       v   = 0.0; // variance proxy
    Eigen::Index d   = 1;
    std::size_t  k   = 1; // number of summands

    void validate() const;
};

/// 2d exp(-(eps^2/2) / (v + L eps/3)), clamped to [0, 2d]. A sum with
/// v = L = 0 is deterministic and the tail is 0 for eps > 0.
double bernstein_tail(const TailQuery &q);

/// Uniform over ordered k-subsets: the first k steps of Fisher-Yates.
std::vector<CMatrix> sample_without_replacement(std::span<const CMatrix> pool, std::size_t k, Rng &rng);

struct VarianceProxy {
    double value   = 0.0; // (a_n/n) sum_i |A_i - A_n|^2
    double ceiling = 0.0; // 4 a_n L1 Linf
    bool   within  = false;
};

VarianceProxy variance_proxy(const ArrayRow &row, std::size_t a_n);

/// b_n 2d exp(-(a_n eps^2/12) / (L1 Linf)); with rescaled the denominator also
/// carries e^{2 L1}, the form used when eps includes the e^{L1} factor of the
/// block conditions. Requires 0 < eps < 3 L1 (eps e^{-L1} < 3 L1 when rescaled).
double lemma_random_bound(std::size_t n, std::size_t a_n, std::size_t b_n, double eps, const RowStats &stats, Eigen::Index d,
                          bool rescaled);

/// Worst raw block gaps of one uniformly permuted row (no e^{L1} factor).
struct BlockGapSample {
    double mean_gap = 0.0; // max_j |block mean - A_n|
    double norm_gap = 0.0; // max_j |block mean of norms - L1|
};

/// One sample per trial; trial t draws its permutation from stream (seed, n, t).
std::vector<BlockGapSample> sample_block_gaps(const ArrayRow &row, const BlockScheme &scheme, std::size_t trials, std::uint64_t seed);

struct BlockTailFrequency {
    double freq_mean_cond = 0.0;
    double freq_norm_cond = 0.0;
};

BlockTailFrequency empirical_block_tail(const ArrayRow &row, const BlockScheme &scheme, double eps, std::size_t trials, std::uint64_t seed);

/// (Linf e^{|A|} / sqrt n) sqrt(2 e^2 log(d / delta)), a literature rate quoted for comparison.
double tropp_ward_rate(std::size_t n, const RowStats &stats, double norm_a, Eigen::Index d, double delta);

/// Geometric grid of `points` values from lo up to (excluding) 3 L1.
std::vector<double> eps_grid(double l1, std::size_t points = 12, double lo = 0.05);

struct TailComparison {
    double      eps                = 0.0;
    double      empirical_freq     = 0.0; // block-mean condition
    double      empirical_norm_freq = 0.0; // scalar norm condition
    double      bernstein_bound    = 0.0; // b_n * bernstein_tail on one block sum (union over blocks)
    double      lemma_bound        = 0.0; // lemma_random_bound, d = row dimension; NaN outside eps < 3 L1
    double      scalar_lemma_bound = 0.0; // same bound with d = 1
    std::size_t trials             = 0;
};

std::vector<TailComparison> compare_tail(const ArrayRow &row, const BlockScheme &scheme, std::span<const double> grid, std::size_t trials,
                                         std::uint64_t seed);
/// Same, from gap samples already drawn with sample_block_gaps.
std::vector<TailComparison> compare_tail(const ArrayRow &row, const BlockScheme &scheme, std::span<const double> grid,
                                         std::span<const BlockGapSample> samples);

/// Columns eps,empirical_freq,bernstein_bound,lemma_bound,trials.
void write_tail_csv(std::ostream &os, std::span<const TailComparison> rows);

} // namespace trotter_shuffle
