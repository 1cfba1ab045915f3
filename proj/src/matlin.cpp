#include "trotter_shuffle/matlin.hpp"

#include <cmath>
#include <string>

#include "trotter_shuffle/errors.hpp"

namespace trotter_shuffle::matlin {

bool is_finite(const CMatrix &M) {
    for(Eigen::Index j = 0; j < M.cols(); ++j)
        for(Eigen::Index i = 0; i < M.rows(); ++i)
            if(!std::isfinite(M(i, j).real()) || !std::isfinite(M(i, j).imag())) return false;
    return true;
}

void require_valid(const CMatrix &M, const char *what) {
    if(M.rows() < 1 || M.rows() != M.cols())
        throw InvalidInput(std::string(what) + ": expected a non-empty square matrix, got " + std::to_string(M.rows()) + "x" +
                           std::to_string(M.cols()));
    if(!is_finite(M)) throw InvalidInput(std::string(what) + ": non-finite entry");
}

double op_norm(const CMatrix &M) {
    require_valid(M, "op_norm");
    if(M.rows() == 1) return std::abs(M(0, 0));
    if(M.rows() == 2) {
        // Largest eigenvalue of the Hermitian 2x2 Gram matrix M*M, written without cancellation.
        const Scalar a = M(0, 0), b = M(0, 1), c = M(1, 0), d = M(1, 1);
        const double p    = std::norm(a) + std::norm(c);
        const double r    = std::norm(b) + std::norm(d);
        const Scalar q    = std::conj(a) * b + std::conj(c) * d;
        const double half = 0.5 * (p - r);
        const double lam  = 0.5 * (p + r) + std::hypot(half, std::abs(q));
        return std::sqrt(lam);
    }
    Eigen::JacobiSVD<CMatrix> svd(M);
    return svd.singularValues()(0);
}

CMatrix mat_exp(const CMatrix &M, double tol) {
    require_valid(M, "mat_exp");
    if(!(tol > 0.0 && tol <= 1e-6)) throw InvalidInput("mat_exp: tol must lie in (0, 1e-6]");

    const auto   d    = M.rows();
    const double norm = M.norm(); // Frobenius, an upper bound for the operator norm
    if(norm == 0.0) return CMatrix::Identity(d, d);

    int squarings = 0;
    if(norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const CMatrix X = M / std::ldexp(1.0, squarings);
    const double  r = X.norm();

    // Remainder after order K is at most 2 r^{K+1}/(K+1)! for r <= 1/2.
    const double target = tol * std::ldexp(1.0, -squarings);
    int          order  = 1;
    double       rem    = r * r; // 2 r^2 / 2!
    while(rem > target && order < 40) {
        ++order;
        rem *= r / static_cast<double>(order + 1);
    }

    const CMatrix I = CMatrix::Identity(d, d);
    CMatrix       E = I;
    for(int k = order; k >= 1; --k) E = I + (X * E) / static_cast<double>(k);
    for(int s = 0; s < squarings; ++s) E = (E * E).eval();
    return E;
}

CMatrix hermitian_dilation(const CMatrix &M) {
    require_valid(M, "hermitian_dilation");
    const auto d = M.rows();
    CMatrix    H = CMatrix::Zero(2 * d, 2 * d);
    H.topRightCorner(d, d)   = M;
    H.bottomLeftCorner(d, d) = M.adjoint();
    return H;
}

CMatrix commutator(const CMatrix &A, const CMatrix &B) {
    require_valid(A, "commutator");
    require_valid(B, "commutator");
    if(A.rows() != B.rows())
        throw DimensionMismatch("commutator: dimensions " + std::to_string(A.rows()) + " and " + std::to_string(B.rows()));
    return A * B - B * A;
}

CMatrix identity(Eigen::Index d) { return CMatrix::Identity(d, d); }
CMatrix zero(Eigen::Index d) { return CMatrix::Zero(d, d); }

CMatrix unit(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
    if(i < 1 || j < 1 || i > d || j > d) throw InvalidInput("unit: index out of range");
    CMatrix E         = CMatrix::Zero(d, d);
    E(i - 1, j - 1) = 1.0;
    return E;
}

} // namespace trotter_shuffle::matlin
