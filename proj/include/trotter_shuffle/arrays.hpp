#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "trotter_shuffle/matlin.hpp"
#include "trotter_shuffle/rng.hpp"

namespace trotter_shuffle {

/// One row {A_{1,n}, ..., A_{n,n}} of a triangular array. Element norms are
/// computed once on construction. Rows built from an alphabet remember which
/// letter sits at each position.
class ArrayRow {
  public:
    static ArrayRow from_elements(std::vector<CMatrix> elements);
    /// elements[i] = alphabet[letter_of[i]]
    static ArrayRow from_letters(std::vector<CMatrix> alphabet, std::vector<std::size_t> letter_of);

    std::size_t  n() const { return elements_.size(); }
    Eigen::Index d() const { return elements_.front().rows(); }

    const CMatrix                &operator[](std::size_t i) const { return elements_[i]; }
    const std::vector<CMatrix>   &elements() const { return elements_; }
    const std::vector<double>    &norms() const { return norms_; }
    bool                          has_alphabet() const { return !alphabet_.empty(); }
    const std::vector<CMatrix>   &alphabet() const { return alphabet_; }
    const std::vector<std::size_t> &letter_of() const { return letter_of_; }

  private:
    ArrayRow() = default;
    std::vector<CMatrix>     elements_;
    std::vector<double>      norms_;
    std::vector<CMatrix>     alphabet_;
    std::vector<std::size_t> letter_of_;
};

struct RowStats {
    CMatrix mean; // A_n
    double  l1   = 0.0;
    double  linf = 0.0;
};

RowStats row_stats(const ArrayRow &row);

/// Scale every element of norm > 1 down to norm 1.
ArrayRow clamp_unit_norm(const ArrayRow &row);

// --- generators -------------------------------------------------------------

enum class TwoLetterOrder { first_half_B, interleaved };
ArrayRow gen_two_letter(std::size_t n, const CMatrix &B, const CMatrix &C, TwoLetterOrder order);

enum class TailMode { identity_fill, repeat_first };
/// Standard layout: position i + k*a_n holds letters[i] for k < floor(n/a_n).
/// identity_fill puts zero matrices (factor e^0 = I) in the leftover slots.
ArrayRow gen_repeated(std::span<const CMatrix> letters, std::size_t n, TailMode tail);

enum class Regime { prob_regime, as_regime, large_Linf, bounded_log, intermediate };

struct RegimeSpec {
    Regime                regime = Regime::prob_regime;
    double                delta  = 0.1;
    double                alpha  = 0.5;
    double                beta   = 0.0;
    double                t      = 1.0;
    std::optional<double> linf; // prob_regime / as_regime only; defaults to log n

    void validate() const;
};

struct RegimeParameters {
    double      k_raw = 0.0; // formula value before rounding
    std::size_t k_n   = 0;
    double      linf  = 0.0;
};

/// k_n and L^inf_n of a regime at row length n. Throws InfeasibleRegime when
/// the rounded k_n falls outside [1, n] or L^inf_n is not positive.
RegimeParameters regime_parameters(std::size_t n, const RegimeSpec &spec);

enum class RemainderMode { random_unit, zero };

struct SpikedOptions {
    Eigen::Index  d               = 2;
    RemainderMode remainder       = RemainderMode::random_unit;
    bool          fixed_direction = false; // use E_11 for every spike instead of random directions
};

struct SpikedRow {
    ArrayRow         row;
    RegimeParameters params;
};

/// k_n spikes of norm exactly L^inf_n followed by n - k_n bounded elements.
SpikedRow gen_spiked(std::size_t n, const RegimeSpec &spec, std::uint64_t direction_seed, const SpikedOptions &opts = {});

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double       value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct QuantizationPlan {
    std::int64_t                              c_n = 0;
    Rational                                  alpha_n;
    std::int64_t                              quantum = 0; // alpha_n * n / c_n
    std::map<std::size_t, std::int64_t>       multiplicities;     // letter -> beta_j
    std::vector<std::size_t>                  retained;           // U_n
    std::map<std::size_t, std::int64_t>       new_multiplicities; // letter -> floor(beta_j / quantum)
    std::int64_t                              a_n_out = 0;

    // Certificate of the two inequalities the construction relies on.
    std::int64_t retained_mass     = 0;   // sum over U_n of beta_j
    double       discrepancy       = 0.0; // weighted-mean gap
    double       discrepancy_bound = 0.0; // 2 alpha_n max_j |B_j|
    bool         mass_ok           = false;
    bool         discrepancy_ok    = false;
    bool         size_ok           = false; // (1 - 2 alpha_n) c_n/alpha_n <= a_n_out <= c_n/alpha_n
};

QuantizationPlan frequency_quantize(const ArrayRow &row, std::int64_t c_n, Rational alpha_n);

enum class SamplingMode { ordered, permuted, iid };

using MatrixFunction = std::function<CMatrix(double)>;

/// ordered: A_i = fn(i/n), i = 0..n-1 (left endpoints); permuted: fn(sigma(i)/n);
/// iid: fn(U_i) with U_i uniform on [0, 1].
ArrayRow gen_riemann(const MatrixFunction &fn, std::size_t n, SamplingMode mode, std::uint64_t seed);

// --- random directions --------------------------------------------------------

/// Gaussian entries, Hermitized, scaled to operator norm 1.
CMatrix random_hermitian_unit(Eigen::Index d, Rng &rng);
/// Complex Gaussian direction scaled to an operator norm drawn uniformly from [0, 1].
CMatrix random_in_unit_ball(Eigen::Index d, Rng &rng);
/// Real diagonal with entries uniform in [-1, 1].
CMatrix random_diagonal(Eigen::Index d, Rng &rng);

} // namespace trotter_shuffle
