#pragma once

#include <complex>
#include <Eigen/Dense>

namespace trotter_shuffle {

using Scalar  = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

namespace matlin {

    inline constexpr double default_exp_tol = 1e-15;

    /// Throws InvalidInput unless M is square, non-empty and finite.
    void require_valid(const CMatrix &M, const char *what = "matrix");

    bool is_finite(const CMatrix &M);

    /// Largest singular value. Closed form for d <= 2, Jacobi SVD otherwise.
    double op_norm(const CMatrix &M);

    /// Scaling and squaring with a truncated Taylor series. The series order is
    /// picked so that the remainder on the scaled matrix (norm <= 1/2) is below
    /// tol * 2^-s, s being the number of squarings.
    CMatrix mat_exp(const CMatrix &M, double tol = default_exp_tol);

    /// [[0, M], [M*, 0]]
    CMatrix hermitian_dilation(const CMatrix &M);

    CMatrix commutator(const CMatrix &A, const CMatrix &B);

    CMatrix identity(Eigen::Index d);
    CMatrix zero(Eigen::Index d);
    /// Matrix unit E_{ij}, 1-based indices as in E12, E21.
    CMatrix unit(Eigen::Index d, Eigen::Index i, Eigen::Index j);

} // namespace matlin
} // namespace trotter_shuffle
