#include "trotter_shuffle/arrays.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "trotter_shuffle/errors.hpp"
#include "trotter_shuffle/permutation.hpp"

namespace trotter_shuffle {

namespace {

    void require_same_dim(const CMatrix &M, Eigen::Index d, const char *what) {
        matlin::require_valid(M, what);
        if(M.rows() != d)
            throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(d) + ", got " +
                                    std::to_string(M.rows()));
    }

    std::string fmt_value(const char *name, double v) {
        std::ostringstream os;
        os.precision(17);
        os << name << " = " << v;
        return os.str();
    }

} // namespace

ArrayRow ArrayRow::from_elements(std::vector<CMatrix> elements) {
    if(elements.empty()) throw InvalidInput("ArrayRow: empty row");
    const auto d = elements.front().rows();
    ArrayRow   row;
    row.norms_.reserve(elements.size());
    for(const auto &M : elements) {
        require_same_dim(M, d, "ArrayRow element");
        row.norms_.push_back(matlin::op_norm(M));
    }
    row.elements_ = std::move(elements);
    return row;
}

ArrayRow ArrayRow::from_letters(std::vector<CMatrix> alphabet, std::vector<std::size_t> letter_of) {
    if(alphabet.empty() || letter_of.empty()) throw InvalidInput("ArrayRow: empty row or alphabet");
    const auto          d = alphabet.front().rows();
    std::vector<double> letter_norms;
    for(const auto &B : alphabet) {
        require_same_dim(B, d, "ArrayRow letter");
        letter_norms.push_back(matlin::op_norm(B));
    }
    ArrayRow row;
    row.elements_.reserve(letter_of.size());
    row.norms_.reserve(letter_of.size());
    for(auto j : letter_of) {
        if(j >= alphabet.size()) throw InvalidInput("ArrayRow: letter index out of range");
        row.elements_.push_back(alphabet[j]);
        row.norms_.push_back(letter_norms[j]);
    }
    row.alphabet_  = std::move(alphabet);
    row.letter_of_ = std::move(letter_of);
    return row;
}

RowStats row_stats(const ArrayRow &row) {
    RowStats    s;
    const auto  n = static_cast<double>(row.n());
    s.mean        = CMatrix::Zero(row.d(), row.d());
    double l1_sum = 0.0;
    for(std::size_t i = 0; i < row.n(); ++i) {
        s.mean += row[i];
        l1_sum += row.norms()[i];
        s.linf = std::max(s.linf, row.norms()[i]);
    }
    s.mean /= n;
    s.l1 = l1_sum / n;
    return s;
}

ArrayRow clamp_unit_norm(const ArrayRow &row) {
    auto scaled = [](const CMatrix &M, double norm) -> CMatrix { return norm > 1.0 ? CMatrix(M / norm) : M; };
    if(row.has_alphabet()) {
        std::vector<CMatrix> alphabet;
        for(const auto &B : row.alphabet()) alphabet.push_back(scaled(B, matlin::op_norm(B)));
        return ArrayRow::from_letters(std::move(alphabet), row.letter_of());
    }
    std::vector<CMatrix> elements;
    elements.reserve(row.n());
    for(std::size_t i = 0; i < row.n(); ++i) elements.push_back(scaled(row[i], row.norms()[i]));
    return ArrayRow::from_elements(std::move(elements));
}

ArrayRow gen_two_letter(std::size_t n, const CMatrix &B, const CMatrix &C, TwoLetterOrder order) {
    if(n == 0 || n % 2 != 0) throw InvalidInput("gen_two_letter: n must be even and positive, got " + std::to_string(n));
    matlin::require_valid(B, "gen_two_letter B");
    require_same_dim(C, B.rows(), "gen_two_letter C");
    std::vector<std::size_t> letter_of(n);
    for(std::size_t i = 0; i < n; ++i)
        letter_of[i] = order == TwoLetterOrder::first_half_B ? (i < n / 2 ? 0 : 1) : i % 2;
    return ArrayRow::from_letters({B, C}, std::move(letter_of));
}

ArrayRow gen_repeated(std::span<const CMatrix> letters, std::size_t n, TailMode tail) {
    const std::size_t a = letters.size();
    if(a == 0) throw InvalidInput("gen_repeated: no letters");
    if(a > n) throw InvalidInput("gen_repeated: a_n = " + std::to_string(a) + " exceeds n = " + std::to_string(n));
    std::vector<CMatrix> alphabet(letters.begin(), letters.end());
    const std::size_t    covered = (n / a) * a;
    std::vector<std::size_t> letter_of(n);
    for(std::size_t i = 0; i < covered; ++i) letter_of[i] = i % a;
    if(covered < n) {
        std::size_t fill = 0;
        if(tail == TailMode::identity_fill) {
            alphabet.push_back(CMatrix::Zero(alphabet.front().rows(), alphabet.front().rows()));
            fill = a;
        }
        for(std::size_t i = covered; i < n; ++i) letter_of[i] = fill;
    }
    return ArrayRow::from_letters(std::move(alphabet), std::move(letter_of));
}

void RegimeSpec::validate() const {
    if(!(delta > 0.0)) throw InvalidInput("RegimeSpec: delta must be positive");
    if(regime == Regime::intermediate) {
        if(!(t > 0.0 && t <= 1.0)) throw InvalidInput("RegimeSpec: intermediate regime needs 0 < t <= 1");
        const bool interior = alpha > 0.0 && alpha < 1.0;
        const bool edge     = alpha == 1.0 && beta <= 0.0;
        if(!interior && !edge) throw InvalidInput("RegimeSpec: intermediate regime needs 0 < alpha < 1, or alpha = 1 with beta <= 0");
    }
    if(linf && !(*linf > 0.0)) throw InvalidInput("RegimeSpec: linf must be positive");
}

RegimeParameters regime_parameters(std::size_t n, const RegimeSpec &spec) {
    spec.validate();
    if(n < 3) throw InfeasibleRegime("regime_parameters: n must be at least 3");
    const double nn     = static_cast<double>(n);
    const double logn   = std::log(nn);
    const double loglog = std::log(logn);
    RegimeParameters p;
    switch(spec.regime) {
        case Regime::prob_regime:
        case Regime::as_regime: {
            p.linf         = spec.linf.value_or(logn);
            const double x = nn / p.linf;
            if(!(x > 1.0)) throw InfeasibleRegime(fmt_value("regime: n / L^inf_n must exceed 1, got n / L^inf_n", x));
            const double lx = std::log(x);
            const double bracket = spec.regime == Regime::prob_regime
                                       ? lx - (4.0 + 2.0 * spec.delta) * std::log(lx)
                                       : lx - loglog - (3.0 + spec.delta) * std::log(lx);
            p.k_raw = nn / (3.0 * p.linf) * bracket;
            break;
        }
        case Regime::large_Linf: {
            const double growth = logn * std::pow(loglog, 3.0 + 2.0 * spec.delta);
            p.linf              = nn / growth;
            p.k_raw             = growth / 3.0;
            break;
        }
        case Regime::bounded_log: {
            p.linf  = (logn - (5.0 + spec.delta) * loglog) / 3.0;
            p.k_raw = nn;
            break;
        }
        case Regime::intermediate: {
            p.linf  = std::pow(nn, 1.0 - spec.alpha) * std::pow(logn, 1.0 - spec.beta) / (3.0 * spec.t);
            p.k_raw = spec.alpha * spec.t * std::pow(nn, spec.alpha) * std::pow(logn, spec.beta);
            break;
        }
    }
    if(!std::isfinite(p.linf) || !(p.linf > 0.0)) throw InfeasibleRegime(fmt_value("regime: non-positive L^inf_n", p.linf));
    if(!std::isfinite(p.k_raw)) throw InfeasibleRegime(fmt_value("regime: non-finite k_n", p.k_raw));
    const double rounded = std::round(p.k_raw);
    if(rounded < 1.0) throw InfeasibleRegime(fmt_value("regime: k_n rounds below 1, k_n", p.k_raw));
    if(rounded > nn) throw InfeasibleRegime(fmt_value("regime: k_n exceeds n, k_n", p.k_raw));
    p.k_n = static_cast<std::size_t>(rounded);
    if(p.k_n < n && p.linf < 1.0)
        throw InfeasibleRegime(fmt_value("regime: spike norm below the remainder bound 1, L^inf_n", p.linf));
    return p;
}

CMatrix random_hermitian_unit(Eigen::Index d, Rng &rng) {
    std::normal_distribution<double> g;
    CMatrix                          G(d, d);
    for(Eigen::Index j = 0; j < d; ++j)
        for(Eigen::Index i = 0; i < d; ++i) G(i, j) = Scalar(g(rng), g(rng));
    CMatrix H = 0.5 * (G + G.adjoint());
    return H / matlin::op_norm(H);
}

CMatrix random_in_unit_ball(Eigen::Index d, Rng &rng) {
    std::normal_distribution<double>       g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CMatrix                                G(d, d);
    for(Eigen::Index j = 0; j < d; ++j)
        for(Eigen::Index i = 0; i < d; ++i) G(i, j) = Scalar(g(rng), g(rng));
    return G * (u(rng) / matlin::op_norm(G));
}

CMatrix random_diagonal(Eigen::Index d, Rng &rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMatrix                                D = CMatrix::Zero(d, d);
    for(Eigen::Index i = 0; i < d; ++i) D(i, i) = u(rng);
    return D;
}

SpikedRow gen_spiked(std::size_t n, const RegimeSpec &spec, std::uint64_t direction_seed, const SpikedOptions &opts) {
    if(opts.d < 1) throw InvalidInput("gen_spiked: d must be positive");
    auto params = regime_parameters(n, spec);
    auto rng    = make_stream(direction_seed, n, 0, StreamTag::generator);

    CMatrix fixed = matlin::unit(opts.d, 1, 1);
    std::vector<CMatrix> elements;
    elements.reserve(n);
    for(std::size_t i = 0; i < params.k_n; ++i) {
        const CMatrix dir = opts.fixed_direction ? fixed : random_hermitian_unit(opts.d, rng);
        elements.push_back(params.linf * dir);
    }
    for(std::size_t i = params.k_n; i < n; ++i) {
        if(opts.remainder == RemainderMode::zero) elements.push_back(CMatrix::Zero(opts.d, opts.d));
        else elements.push_back(random_hermitian_unit(opts.d, rng));
    }
    return {ArrayRow::from_elements(std::move(elements)), params};
}

QuantizationPlan frequency_quantize(const ArrayRow &row, std::int64_t c_n, Rational alpha_n) {
    if(!row.has_alphabet()) throw InvalidInput("frequency_quantize: row has no alphabet");
    if(c_n < 1) throw InvalidInput("frequency_quantize: c_n must be positive");
    if(alpha_n.den <= 0 || alpha_n.num <= 0 || alpha_n.num >= alpha_n.den)
        throw InvalidInput("frequency_quantize: alpha_n must be a rational in (0, 1)");
    if(static_cast<std::int64_t>(row.alphabet().size()) > c_n)
        throw PreconditionError("frequency_quantize: alphabet larger than c_n");

    const auto n       = static_cast<std::int64_t>(row.n());
    const auto numer   = alpha_n.num * n;
    const auto denom   = alpha_n.den * c_n;
    if(numer % denom != 0 || numer / denom < 1)
        throw InvalidInput("frequency_quantize: alpha_n * n / c_n is not a positive integer");

    QuantizationPlan plan;
    plan.c_n     = c_n;
    plan.alpha_n = alpha_n;
    plan.quantum = numer / denom;

    for(std::size_t j = 0; j < row.alphabet().size(); ++j) plan.multiplicities[j] = 0;
    for(auto j : row.letter_of()) ++plan.multiplicities[j];

    const auto d   = row.d();
    CMatrix    kept = CMatrix::Zero(d, d);
    CMatrix    full = CMatrix::Zero(d, d);
    double     max_norm = 0.0;
    for(const auto &[j, beta] : plan.multiplicities) {
        const CMatrix &B = row.alphabet()[j];
        max_norm         = std::max(max_norm, matlin::op_norm(B));
        full += static_cast<double>(beta) * B;
        if(beta >= plan.quantum) {
            const auto m = beta / plan.quantum;
            plan.retained.push_back(j);
            plan.new_multiplicities[j] = m;
            plan.a_n_out += m;
            plan.retained_mass += beta;
            kept += static_cast<double>(m) * B;
        }
    }
    const double nd        = static_cast<double>(n);
    plan.discrepancy       = matlin::op_norm(kept * (static_cast<double>(plan.quantum) / nd) - full / nd);
    plan.discrepancy_bound = 2.0 * alpha_n.value() * max_norm;
    plan.discrepancy_ok    = plan.discrepancy <= plan.discrepancy_bound + 1e-12 * (1.0 + max_norm);
    // (1 - alpha) n <= retained mass, in integers
    plan.mass_ok = alpha_n.den * plan.retained_mass >= (alpha_n.den - alpha_n.num) * n;
    // (1 - 2 alpha) c/alpha <= a_out <= c/alpha, in integers
    plan.size_ok = plan.a_n_out * alpha_n.num <= c_n * alpha_n.den &&
                   plan.a_n_out * alpha_n.num >= c_n * (alpha_n.den - 2 * alpha_n.num);
    return plan;
}

ArrayRow gen_riemann(const MatrixFunction &fn, std::size_t n, SamplingMode mode, std::uint64_t seed) {
    if(n == 0) throw InvalidInput("gen_riemann: n must be positive");
    const double         nn = static_cast<double>(n);
    std::vector<double>  points(n);
    switch(mode) {
        case SamplingMode::ordered:
            for(std::size_t i = 0; i < n; ++i) points[i] = static_cast<double>(i) / nn;
            break;
        case SamplingMode::permuted: {
            auto rng   = make_stream(seed, n, 0, StreamTag::permutation);
            auto sigma = uniform_permutation(n, rng);
            for(std::size_t i = 0; i < n; ++i) points[i] = static_cast<double>(sigma[i]) / nn;
            break;
        }
        case SamplingMode::iid: {
            auto                                   rng = make_stream(seed, n, 0, StreamTag::sampling);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for(auto &x : points) x = u(rng);
            break;
        }
    }
    std::vector<CMatrix> elements;
    elements.reserve(n);
    for(double x : points) {
        CMatrix M = fn(x);
        if(!matlin::is_finite(M)) throw InvalidInput("gen_riemann: fn returned a non-finite value at x = " + std::to_string(x));
        if(!elements.empty() && M.rows() != elements.front().rows())
            throw DimensionMismatch("gen_riemann: fn returned inconsistent dimensions");
        elements.push_back(std::move(M));
    }
    return ArrayRow::from_elements(std::move(elements));
}

} // namespace trotter_shuffle
