#include "trotter_shuffle/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "trotter_shuffle/csv.hpp"
#include "trotter_shuffle/errors.hpp"

namespace trotter_shuffle {

void TailQuery::validate() const {
    if(!(eps >= 0.0) || !(L >= 0.0) || !(v >= 0.0)) throw InvalidInput("TailQuery: eps, L and v must be non-negative");
    if(d < 1) throw InvalidInput("TailQuery: d must be at least 1");
}

double bernstein_tail(const TailQuery &q) {
    q.validate();
    const double cap = 2.0 * static_cast<double>(q.d);
    if(q.eps == 0.0) return cap;
    const double denom = q.v + q.L * q.eps / 3.0;
    if(denom == 0.0) return 0.0;
    return std::clamp(cap * std::exp(-(0.5 * q.eps * q.eps) / denom), 0.0, cap);
}

std::vector<CMatrix> sample_without_replacement(std::span<const CMatrix> pool, std::size_t k, Rng &rng) {
    if(k > pool.size())
        throw InvalidInput("sample_without_replacement: k = " + std::to_string(k) + " exceeds pool size " + std::to_string(pool.size()));
    std::vector<std::size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Fisher-Yates from the back, same draws as uniform_permutation; the last k
    // slots are a uniform ordered k-subset.
    const std::size_t m = pool.size();
    for(std::size_t i = m; i-- > 1 && i + k >= m;) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::vector<CMatrix> out;
    out.reserve(k);
    for(std::size_t i = 0; i < k; ++i) out.push_back(pool[idx[m - 1 - i]]);
    return out;
}

VarianceProxy variance_proxy(const ArrayRow &row, std::size_t a_n) {
    if(a_n < 1 || a_n > row.n()) throw InvalidInput("variance_proxy: need 1 <= a_n <= n");
    const auto stats = row_stats(row);
    double     sum   = 0.0;
    for(const auto &A : row.elements()) {
        const double r = matlin::op_norm(A - stats.mean);
        sum += r * r;
    }
    VarianceProxy vp;
    const double  a = static_cast<double>(a_n);
    vp.value        = a / static_cast<double>(row.n()) * sum;
    vp.ceiling      = 4.0 * a * stats.l1 * stats.linf;
    vp.within       = vp.value <= vp.ceiling * (1.0 + 1e-12) + 1e-300;
    return vp;
}

double lemma_random_bound(std::size_t n, std::size_t a_n, std::size_t b_n, double eps, const RowStats &stats, Eigen::Index d,
                          bool rescaled) {
    if(a_n < 1 || b_n < 1 || a_n * b_n > n) throw InvalidInput("lemma_random_bound: need a_n, b_n >= 1 and a_n b_n <= n");
    if(d < 1) throw InvalidInput("lemma_random_bound: d must be at least 1");
    if(!(eps > 0.0)) throw PreconditionError("lemma_random_bound: requires eps > 0");
    const double effective = rescaled ? eps * std::exp(-stats.l1) : eps;
    if(!(effective < 3.0 * stats.l1))
        throw PreconditionError(rescaled ? "lemma_random_bound: requires eps e^{-L1} < 3 L1" : "lemma_random_bound: requires eps < 3 L1");
    double denom = stats.l1 * stats.linf;
    if(rescaled) denom *= std::exp(2.0 * stats.l1);
    const double exponent = static_cast<double>(a_n) * eps * eps / 12.0 / denom;
    return static_cast<double>(b_n) * 2.0 * static_cast<double>(d) * std::exp(-exponent);
}

std::vector<BlockGapSample> sample_block_gaps(const ArrayRow &row, const BlockScheme &scheme, std::size_t trials, std::uint64_t seed) {
    if(trials < 1) throw InvalidInput("sample_block_gaps: trials must be at least 1");
    if(scheme.covered() > row.n()) throw InvalidInput("sample_block_gaps: block scheme does not fit the row");
    const auto   stats = row_stats(row);
    const double a     = static_cast<double>(scheme.a_n);

    std::vector<BlockGapSample> out(trials);
    CMatrix                     sum(row.d(), row.d());
    for(std::size_t t = 0; t < trials; ++t) {
        auto rng   = make_stream(seed, row.n(), t, StreamTag::block_tail);
        auto sigma = uniform_permutation(row.n(), rng);
        auto &g    = out[t];
        for(std::size_t j = 0; j < scheme.b_n; ++j) {
            sum.setZero();
            double norm_sum = 0.0;
            for(std::size_t i = scheme.block_begin(j); i < scheme.block_end(j); ++i) {
                sum += row[sigma[i]];
                norm_sum += row.norms()[sigma[i]];
            }
            sum /= a;
            sum -= stats.mean;
            g.mean_gap = std::max(g.mean_gap, matlin::op_norm(sum));
            g.norm_gap = std::max(g.norm_gap, std::abs(norm_sum / a - stats.l1));
        }
    }
    return out;
}

namespace {

    BlockTailFrequency frequencies(std::span<const BlockGapSample> samples, double eps) {
        std::size_t mean_hits = 0, norm_hits = 0;
        for(const auto &s : samples) {
            mean_hits += s.mean_gap > eps;
            norm_hits += s.norm_gap > eps;
        }
        const double t = static_cast<double>(samples.size());
        return {static_cast<double>(mean_hits) / t, static_cast<double>(norm_hits) / t};
    }

} // namespace

BlockTailFrequency empirical_block_tail(const ArrayRow &row, const BlockScheme &scheme, double eps, std::size_t trials, std::uint64_t seed) {
    const auto samples = sample_block_gaps(row, scheme, trials, seed);
    return frequencies(samples, eps);
}

double tropp_ward_rate(std::size_t n, const RowStats &stats, double norm_a, Eigen::Index d, double delta) {
    if(!(delta > 0.0 && delta < 1.0)) throw InvalidInput("tropp_ward_rate: delta must lie in (0, 1)");
    if(n < 1 || d < 1) throw InvalidInput("tropp_ward_rate: n and d must be positive");
    const double e2 = std::exp(2.0);
    return stats.linf * std::exp(norm_a) / std::sqrt(static_cast<double>(n)) *
           std::sqrt(2.0 * e2 * std::log(static_cast<double>(d) / delta));
}

std::vector<double> eps_grid(double l1, std::size_t points, double lo) {
    const double hi = 3.0 * l1;
    if(points < 1 || !(lo > 0.0) || !(hi > lo)) throw InvalidInput("eps_grid: need 0 < lo < 3 L1 and at least one point");
    std::vector<double> grid(points);
    for(std::size_t k = 0; k < points; ++k)
        grid[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(points));
    return grid;
}

std::vector<TailComparison> compare_tail(const ArrayRow &row, const BlockScheme &scheme, std::span<const double> grid, std::size_t trials,
                                         std::uint64_t seed) {
    const auto samples = sample_block_gaps(row, scheme, trials, seed);
    return compare_tail(row, scheme, grid, samples);
}

std::vector<TailComparison> compare_tail(const ArrayRow &row, const BlockScheme &scheme, std::span<const double> grid,
                                         std::span<const BlockGapSample> samples) {
    if(samples.empty()) throw InvalidInput("compare_tail: no samples");
    const std::size_t trials = samples.size();
    const auto stats   = row_stats(row);
    const auto vp      = variance_proxy(row, scheme.a_n);
    const double a     = static_cast<double>(scheme.a_n);
    const double nan   = std::numeric_limits<double>::quiet_NaN();

    std::vector<TailComparison> out;
    for(double eps : grid) {
        TailComparison c;
        c.eps    = eps;
        c.trials = trials;
        const auto f          = frequencies(samples, eps);
        c.empirical_freq      = f.freq_mean_cond;
        c.empirical_norm_freq = f.freq_norm_cond;
        c.bernstein_bound = static_cast<double>(scheme.b_n) * bernstein_tail({a * eps, 2.0 * stats.linf, vp.value, row.d(), scheme.a_n});
        const bool in_range = eps > 0.0 && eps < 3.0 * stats.l1;
        c.lemma_bound        = in_range ? lemma_random_bound(row.n(), scheme.a_n, scheme.b_n, eps, stats, row.d(), false) : nan;
        c.scalar_lemma_bound = in_range ? lemma_random_bound(row.n(), scheme.a_n, scheme.b_n, eps, stats, 1, false) : nan;
        out.push_back(c);
    }
    return out;
}

void write_tail_csv(std::ostream &os, std::span<const TailComparison> rows) {
    os << "eps,empirical_freq,bernstein_bound,lemma_bound,trials\n";
    for(const auto &r : rows)
        os << csv::num(r.eps) << ',' << csv::num(r.empirical_freq) << ',' << csv::num(r.bernstein_bound) << ',' << csv::num(r.lemma_bound) << ','
           << r.trials << '\n';
}

} // namespace trotter_shuffle
