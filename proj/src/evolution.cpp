#include "trotter_shuffle/evolution.hpp"

#include <cmath>
#include <numbers>

#include "trotter_shuffle/errors.hpp"

namespace trotter_shuffle {

CMatrix CatalogFunction::operator()(double x) const {
    switch(kind) {
        case CatalogKind::constant: return first;
        case CatalogKind::linear_diagonal: return x * first;
        case CatalogKind::step: return x < 0.5 ? first : second;
        case CatalogKind::rotation: return std::cos(std::numbers::pi * x) * first + std::sin(std::numbers::pi * x) * second;
    }
    return first;
}

MatrixFunction CatalogFunction::as_function() const {
    return [f = *this](double x) { return f(x); };
}

double CatalogFunction::sup_norm() const {
    switch(kind) {
        case CatalogKind::constant:
        case CatalogKind::linear_diagonal: return matlin::op_norm(first);
        case CatalogKind::step: return std::max(matlin::op_norm(first), matlin::op_norm(second));
        case CatalogKind::rotation: return matlin::op_norm(first) + matlin::op_norm(second);
    }
    return 0.0;
}

std::optional<CMatrix> CatalogFunction::ordered_limit(double s, double t) const {
    switch(kind) {
        case CatalogKind::constant: return matlin::mat_exp((t - s) * first);
        case CatalogKind::linear_diagonal: return matlin::mat_exp((t * t - s * s) / 2.0 * first);
        case CatalogKind::step: {
            const double left  = std::max(0.0, std::min(t, 0.5) - s);
            const double right = std::max(0.0, t - std::max(s, 0.5));
            return matlin::mat_exp(left * first) * matlin::mat_exp(right * second);
        }
        case CatalogKind::rotation: return std::nullopt;
    }
    return std::nullopt;
}

const char *to_string(CatalogKind kind) {
    switch(kind) {
        case CatalogKind::constant: return "constant";
        case CatalogKind::linear_diagonal: return "linear_diagonal";
        case CatalogKind::step: return "step";
        case CatalogKind::rotation: return "rotation";
    }
    return "?";
}

CatalogFunction CatalogFunction::parse(const std::string &name, const CMatrix &first, const CMatrix &second) {
    CatalogFunction f;
    if(name == "constant") f.kind = CatalogKind::constant;
    else if(name == "linear_diagonal") f.kind = CatalogKind::linear_diagonal;
    else if(name == "step") f.kind = CatalogKind::step;
    else if(name == "rotation") f.kind = CatalogKind::rotation;
    else throw InvalidInput("unknown catalog function '" + name + "'");
    matlin::require_valid(first, "catalog function matrix");
    f.first = first;
    if(f.kind == CatalogKind::step || f.kind == CatalogKind::rotation) {
        matlin::require_valid(second, "catalog function matrix");
        if(second.rows() != first.rows()) throw DimensionMismatch("catalog function: matrices differ in dimension");
        f.second = second;
    }
    if(f.kind == CatalogKind::linear_diagonal && !first.isDiagonal(0.0))
        throw InvalidInput("linear_diagonal: matrix must be diagonal");
    return f;
}

void PropagatorSpec::validate() const {
    if(!fn) throw InvalidInput("PropagatorSpec: missing function");
    if(!(0.0 <= s && s <= t && t <= 1.0)) throw InvalidInput("PropagatorSpec: need 0 <= s <= t <= 1");
    if(n < 1) throw InvalidInput("PropagatorSpec: n must be positive");
}

CMatrix riemann_integral(const MatrixFunction &fn, std::size_t n) {
    if(n < 1) throw InvalidInput("riemann_integral: n must be positive");
    const double nn  = static_cast<double>(n);
    CMatrix      sum = fn(0.0);
    matlin::require_valid(sum, "riemann_integral value");
    for(std::size_t i = 1; i < n; ++i) {
        CMatrix v = fn(static_cast<double>(i) / nn);
        if(!matlin::is_finite(v)) throw InvalidInput("riemann_integral: non-finite value");
        if(v.rows() != sum.rows()) throw DimensionMismatch("riemann_integral: inconsistent dimensions");
        sum += v;
    }
    return sum / nn;
}

namespace {

    std::size_t grid_index(double x, std::size_t n) {
        return static_cast<std::size_t>(std::floor(x * static_cast<double>(n)));
    }

} // namespace

CMatrix propagate_row(const ArrayRow &row, double s, double t) {
    if(!(0.0 <= s && s <= t && t <= 1.0)) throw InvalidInput("propagate: need 0 <= s <= t <= 1");
    const std::size_t n  = row.n();
    const double      nn = static_cast<double>(n);
    CMatrix           U  = matlin::identity(row.d());
    for(std::size_t i = grid_index(s, n); i < grid_index(t, n); ++i) U = U * matlin::mat_exp(row[i] / nn);
    return U;
}

CMatrix propagate(const PropagatorSpec &spec) {
    spec.validate();
    return propagate_row(gen_riemann(spec.fn, spec.n, spec.mode, spec.seed), spec.s, spec.t);
}

CMatrix averaged_limit(const PropagatorSpec &spec) {
    spec.validate();
    return matlin::mat_exp((spec.t - spec.s) * riemann_integral(spec.fn, 4 * spec.n));
}

double cocycle_check(const PropagatorSpec &spec, double r) {
    spec.validate();
    if(!(spec.s <= r && r <= spec.t)) throw InvalidInput("cocycle_check: r must lie in [s, t]");
    const auto row = gen_riemann(spec.fn, spec.n, spec.mode, spec.seed);
    return matlin::op_norm(propagate_row(row, spec.s, r) * propagate_row(row, r, spec.t) - propagate_row(row, spec.s, spec.t));
}

} // namespace trotter_shuffle
