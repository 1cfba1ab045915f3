#include "trotter_shuffle/trotter.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "trotter_shuffle/csv.hpp"
#include "trotter_shuffle/errors.hpp"

namespace trotter_shuffle {

namespace {

    std::size_t ceil_sqrt(std::size_t n) {
        auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
        while(r * r < n) ++r;
        while(r > 0 && (r - 1) * (r - 1) >= n) --r;
        return r;
    }

    void require_match(const ArrayRow &row, const Permutation &sigma, const char *what) {
        if(sigma.n() != row.n())
            throw DimensionMismatch(std::string(what) + ": permutation of size " + std::to_string(sigma.n()) + " for a row of length " +
                                    std::to_string(row.n()));
    }

} // namespace

BlockScheme BlockScheme::for_row(std::size_t n, std::size_t a_n) {
    if(a_n < 1 || a_n > n) throw InvalidInput("BlockScheme: need 1 <= a_n <= n, got a_n = " + std::to_string(a_n));
    return {a_n, n / a_n};
}

double PathReport::max_deviation() const { return *std::max_element(deviations.begin(), deviations.end()); }

std::vector<CMatrix> factor_exponentials(const ArrayRow &row) {
    const double         nn = static_cast<double>(row.n());
    std::vector<CMatrix> factors;
    factors.reserve(row.n());
    if(row.has_alphabet()) {
        std::vector<CMatrix> per_letter;
        for(const auto &B : row.alphabet()) per_letter.push_back(matlin::mat_exp(B / nn));
        for(auto j : row.letter_of()) factors.push_back(per_letter[j]);
    } else {
        for(const auto &A : row.elements()) factors.push_back(matlin::mat_exp(A / nn));
    }
    return factors;
}

std::vector<CMatrix> partial_products(const ArrayRow &row, const Permutation &sigma) {
    require_match(row, sigma, "partial_products");
    const auto           factors = factor_exponentials(row);
    std::vector<CMatrix> P;
    P.reserve(row.n() + 1);
    P.push_back(matlin::identity(row.d()));
    for(std::size_t k = 0; k < row.n(); ++k) P.push_back(P.back() * factors[sigma[k]]);
    return P;
}

std::vector<CMatrix> reference_path(const CMatrix &A, std::size_t n) {
    matlin::require_valid(A, "reference_path");
    if(n == 0) throw InvalidInput("reference_path: n must be positive");
    const double         nn     = static_cast<double>(n);
    const std::size_t    stride = ceil_sqrt(n);
    const CMatrix        step   = matlin::mat_exp(A / nn);
    std::vector<CMatrix> R;
    R.reserve(n + 1);
    R.push_back(matlin::identity(A.rows()));
    for(std::size_t k = 1; k <= n; ++k) {
        if(k % stride == 0 || k == n) R.push_back(matlin::mat_exp(A * (static_cast<double>(k) / nn)));
        else R.push_back(R.back() * step);
    }
    return R;
}

PathEvaluator::PathEvaluator(const ArrayRow &row, const CMatrix &target)
    : n_(row.n()), factors_(factor_exponentials(row)), reference_(reference_path(target, row.n())) {
    if(target.rows() != row.d())
        throw DimensionMismatch("path_deviation: target dimension " + std::to_string(target.rows()) + " vs row dimension " +
                                std::to_string(row.d()));
    const double tn = matlin::op_norm(target);
    slack_          = tn * std::exp(tn) / static_cast<double>(n_);
}

PathReport PathEvaluator::evaluate(const Permutation &sigma) const {
    if(sigma.n() != n_) throw DimensionMismatch("path_deviation: permutation size does not match the row");
    PathReport rep;
    rep.deviations.resize(n_ + 1);
    rep.deviations[0] = 0.0;
    CMatrix P         = matlin::identity(reference_.front().rows());
    CMatrix diff(P.rows(), P.cols());
    for(std::size_t k = 1; k <= n_; ++k) {
        P                 = P * factors_[sigma[k - 1]];
        diff              = P - reference_[k];
        rep.deviations[k] = matlin::op_norm(diff);
    }
    rep.slack   = slack_;
    rep.sup_dev = rep.max_deviation() + slack_;
    return rep;
}

PathReport path_deviation(const ArrayRow &row, const Permutation &sigma, const CMatrix &target) {
    require_match(row, sigma, "path_deviation");
    return PathEvaluator(row, target).evaluate(sigma);
}

BlockConditionReport check_block_conditions(const ArrayRow &row, const Permutation &sigma, const BlockScheme &scheme, double eps) {
    require_match(row, sigma, "check_block_conditions");
    if(scheme.a_n < 1 || scheme.b_n < 1 || scheme.covered() > row.n())
        throw InvalidInput("check_block_conditions: block scheme does not fit the row");
    const auto   stats = row_stats(row);
    const double scale = std::exp(stats.l1);
    const double a     = static_cast<double>(scheme.a_n);

    BlockConditionReport rep;
    CMatrix              sum(row.d(), row.d());
    for(std::size_t j = 0; j < scheme.b_n; ++j) {
        sum.setZero();
        double norm_sum = 0.0;
        for(std::size_t i = scheme.block_begin(j); i < scheme.block_end(j); ++i) {
            sum += row[sigma[i]];
            norm_sum += row.norms()[sigma[i]];
        }
        rep.worst_mean_gap = std::max(rep.worst_mean_gap, matlin::op_norm(sum / a - stats.mean) * scale);
        rep.worst_norm_gap = std::max(rep.worst_norm_gap, std::abs(norm_sum / a - stats.l1) * scale);
    }
    rep.ok = rep.worst_mean_gap <= eps && rep.worst_norm_gap <= eps;
    return rep;
}

double prop_uniform_bound(double l1, double norm_mean, double eps, std::size_t b_n) {
    if(l1 < 0.0 || norm_mean < 0.0 || eps < 0.0) throw InvalidInput("prop_uniform_bound: arguments must be non-negative");
    if(b_n < 1) throw InvalidInput("prop_uniform_bound: b_n must be at least 1");
    if(norm_mean > l1 * (1.0 + 1e-12) + 1e-15) throw PreconditionError("prop_uniform_bound: requires |A_n| <= L1");
    const double b     = static_cast<double>(b_n);
    const double le    = l1 + eps;
    const double inner = std::exp(eps / b) * le * le + (le + norm_mean) + norm_mean * norm_mean;
    return 1.5 / b * inner * std::exp(le) + eps * std::exp(eps);
}

BlockScheme choose_blocks(std::size_t n, const RowStats &stats, BlockMode mode) {
    if(n < 4) throw InvalidInput("choose_blocks: n must be at least 4");
    const double nn    = static_cast<double>(n);
    const double scale = std::max(1.0, stats.l1 * stats.linf * std::exp(2.0 * stats.l1));
    std::size_t  a     = 0;
    switch(mode) {
        case BlockMode::sqrt_default: a = ceil_sqrt(n); break;
        case BlockMode::probability: a = static_cast<std::size_t>(std::ceil(std::sqrt(nn * scale))); break;
        case BlockMode::almost_sure: a = static_cast<std::size_t>(std::ceil(std::sqrt(nn * std::log(nn) * scale))); break;
    }
    a = std::clamp<std::size_t>(a, 1, n / 2);
    return BlockScheme::for_row(n, a);
}

void write_path_csv(std::ostream &os, std::size_t trial, const PathReport &report, std::size_t points, bool header) {
    if(header) os << "trial,k,deviation,sup_dev,slack\n";
    const std::size_t n = report.deviations.size() - 1;
    auto              row = [&](std::size_t k) { os << trial << ',' << k << ',' << csv::num(report.deviations[k]) << ",,\n"; };
    if(points == 0 || points > n + 1) {
        for(std::size_t k = 0; k <= n; ++k) row(k);
    } else {
        const double m_max = static_cast<double>(points - 1);
        std::size_t  last  = static_cast<std::size_t>(-1);
        for(std::size_t m = 0; m < points; ++m) {
            const auto k = points == 1 ? n : static_cast<std::size_t>(std::llround(static_cast<double>(m) * static_cast<double>(n) / m_max));
            if(k != last) row(k);
            last = k;
        }
    }
    os << trial << ",," << csv::num(report.max_deviation()) << ',' << csv::num(report.sup_dev) << ',' << csv::num(report.slack) << '\n';
}

} // namespace trotter_shuffle
