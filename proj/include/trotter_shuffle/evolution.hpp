#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "trotter_shuffle/arrays.hpp"

namespace trotter_shuffle {

/// Built-in generators A(x) on [0, 1].
enum class CatalogKind { constant, linear_diagonal, step, rotation };

struct CatalogFunction {
    CatalogKind kind = CatalogKind::constant;
    CMatrix     first;  // constant: A; linear_diagonal: D; step: B on [0, 1/2); rotation: X
    CMatrix     second; // step: C on [1/2, 1]; rotation: Z

    /// constant: A; linear_diagonal: x D; step: B or C; rotation: cos(pi x) X + sin(pi x) Z.
    CMatrix        operator()(double x) const;
    MatrixFunction as_function() const;
    /// sup over [0, 1] of |A(x)|.
    double sup_norm() const;
    /// The product integral U(s, t) in closed form (rotation has none).
    std::optional<CMatrix> ordered_limit(double s, double t) const;

    static CatalogFunction parse(const std::string &name, const CMatrix &first, const CMatrix &second);
};

const char *to_string(CatalogKind kind);

struct PropagatorSpec {
    MatrixFunction fn;
    double         s    = 0.0;
    double         t    = 1.0;
    std::size_t    n    = 1;
    SamplingMode   mode = SamplingMode::ordered;
    std::uint64_t  seed = 0;

    void validate() const;
};

/// Left-endpoint sum (1/n) sum_{i<n} fn(i/n).
CMatrix riemann_integral(const MatrixFunction &fn, std::size_t n);

/// Ordered product of e^{A_i / n} over 1-based i in ([s n], [t n]].
CMatrix propagate_row(const ArrayRow &row, double s, double t);

CMatrix propagate(const PropagatorSpec &spec);

/// e^{(t - s) int_0^1 A}, the integral taken on a 4n grid.
CMatrix averaged_limit(const PropagatorSpec &spec);

/// |U(s,r) U(r,t) - U(s,t)| with all three products taken on one shared row.
double cocycle_check(const PropagatorSpec &spec, double r);

} // namespace trotter_shuffle
