#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "trotter_shuffle/arrays.hpp"
#include "trotter_shuffle/matlin.hpp"
#include "trotter_shuffle/permutation.hpp"

namespace trotter_shuffle {

/// Partition of {0, ..., a_n b_n - 1} into b_n consecutive blocks of size a_n.
/// Indices past a_n b_n belong to no block.
struct BlockScheme {
    std::size_t a_n = 1;
    std::size_t b_n = 1;

    static BlockScheme for_row(std::size_t n, std::size_t a_n);

    std::size_t covered() const { return a_n * b_n; }
    std::size_t block_begin(std::size_t j) const { return j * a_n; }
    std::size_t block_end(std::size_t j) const { return (j + 1) * a_n; }
};

struct PathReport {
    std::vector<double> deviations; // |P_k - e^{k A / n}|, k = 0..n
    double              slack   = 0.0;
    double              sup_dev = 0.0; // max(deviations) + slack

    double max_deviation() const;
    double final_deviation() const { return deviations.back(); }
};

/// e^{A_i / n} for every element, one exponential per distinct letter when the
/// row carries an alphabet.
std::vector<CMatrix> factor_exponentials(const ArrayRow &row);

/// P_0 = I, P_k = P_{k-1} e^{A_{sigma(k)} / n}.
std::vector<CMatrix> partial_products(const ArrayRow &row, const Permutation &sigma);

/// R_k = e^{k A / n}, k = 0..n. Powers of e^{A/n} with a fresh exponential every
/// ceil(sqrt(n)) steps.
std::vector<CMatrix> reference_path(const CMatrix &A, std::size_t n);

/// Evaluates many permutations of one row against one target, reusing the
/// factor exponentials and the reference path.
class PathEvaluator {
  public:
    PathEvaluator(const ArrayRow &row, const CMatrix &target);

    PathReport evaluate(const Permutation &sigma) const;

    std::size_t n() const { return n_; }
    double      slack() const { return slack_; }

  private:
    std::size_t          n_;
    std::vector<CMatrix> factors_;
    std::vector<CMatrix> reference_;
    double               slack_;
};

/// slack = |target| e^{|target|} / n bounds the variation of e^{t target} over
/// one grid cell, so sup_dev bounds the deviation over all t in [0, 1].
PathReport path_deviation(const ArrayRow &row, const Permutation &sigma, const CMatrix &target);

struct BlockConditionReport {
    bool   ok             = false;
    double worst_mean_gap = 0.0; // max_j |block mean - A_n| e^{L1}
    double worst_norm_gap = 0.0; // max_j |block mean of norms - L1| e^{L1}
};

BlockConditionReport check_block_conditions(const ArrayRow &row, const Permutation &sigma, const BlockScheme &scheme, double eps);

/// Deterministic bound on sup_t |P_[tn] - e^{t A_n}| when both block conditions
/// hold at eps:
///   3/(2 b_n) (e^{eps/b_n} (L1+eps)^2 + (L1+eps+|A_n|) + |A_n|^2) e^{L1+eps} + eps e^{eps}
double prop_uniform_bound(double l1, double norm_mean, double eps, std::size_t b_n);

enum class BlockMode { probability, almost_sure, sqrt_default };

/// Block size for row length n; always 1 <= a_n <= n/2.
BlockScheme choose_blocks(std::size_t n, const RowStats &stats, BlockMode mode);

/// Columns trial,k,deviation,sup_dev,slack. Point rows leave the last two empty;
/// the closing summary row leaves k empty and carries max deviation. points = 0
/// writes every k, otherwise k = round(m n / (points - 1)).
void write_path_csv(std::ostream &os, std::size_t trial, const PathReport &report, std::size_t points = 0, bool header = true);

} // namespace trotter_shuffle
