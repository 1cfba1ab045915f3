#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "trotter_shuffle/errors.hpp"
#include "trotter_shuffle/matlin.hpp"

using namespace trotter_shuffle;

namespace {

CMatrix random_matrix(Eigen::Index d, double norm, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    CMatrix                          M(d, d);
    for(Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = {g(rng), g(rng)};
    return M * (norm / oracle::op_norm(M));
}

double dist(const CMatrix &A, const CMatrix &B) { return oracle::op_norm(A - B); }

} // namespace

TEST_CASE("mat_exp closed forms") {
    CHECK(dist(matlin::mat_exp(matlin::zero(2)), matlin::identity(2)) == 0.0);

    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0)   = 1.0;
    D(1, 1)   = 2.0;
    const CMatrix E = matlin::mat_exp(D);
    CHECK(std::abs(E(0, 0) - std::exp(1.0)) < 1e-14 * std::exp(1.0));
    CHECK(std::abs(E(1, 1) - std::exp(2.0)) < 1e-14 * std::exp(2.0));
    CHECK(std::abs(E(0, 1)) == 0.0);

    CMatrix J(2, 2);
    J << 1.0, 1.0, 0.0, 1.0;
    CHECK(dist(matlin::mat_exp(matlin::unit(2, 1, 2)), J) < 1e-15);
}

TEST_CASE("mat_exp agrees with the series oracle") {
    std::mt19937_64 rng(17);
    for(int trial = 0; trial < 200; ++trial) {
        const Eigen::Index d    = 2 + trial % 5;
        const double       norm = 4.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const CMatrix      M    = random_matrix(d, norm, rng);
        CHECK(dist(matlin::mat_exp(M), oracle::exp_series(M)) <= 1e-10 * std::exp(norm));
    }
}

TEST_CASE("mat_exp inverse and norm properties") {
    std::mt19937_64 rng(5);
    for(int trial = 0; trial < 100; ++trial) {
        const double  norm = 5.0 * (trial + 1) / 100.0;
        const CMatrix M    = random_matrix(2 + trial % 4, norm, rng);
        const CMatrix E    = matlin::mat_exp(M);
        const auto    I    = matlin::identity(M.rows());
        CHECK(dist(E * matlin::mat_exp(-M), I) <= 1e-8 * std::exp(2 * norm));
        CHECK(matlin::op_norm(E) <= std::exp(matlin::op_norm(M)) + 1e-8);
    }
}

TEST_CASE("mat_exp rejects bad input") {
    CMatrix M = matlin::identity(2);
    M(0, 1)   = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(matlin::mat_exp(M), InvalidInput);
    M(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(matlin::mat_exp(M), InvalidInput);
    CHECK_THROWS_AS(matlin::mat_exp(matlin::identity(2), 1e-3), InvalidInput);
    CHECK_THROWS_AS(matlin::mat_exp(matlin::identity(2), 0.0), InvalidInput);
    CHECK_THROWS_AS(matlin::mat_exp(CMatrix(2, 3)), InvalidInput);
}

TEST_CASE("op_norm examples") {
    CHECK(matlin::op_norm(matlin::identity(3)) == doctest::Approx(1.0).epsilon(1e-14));
    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0)   = 3.0;
    D(1, 1)   = -1.0;
    CHECK(matlin::op_norm(D) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(matlin::op_norm(2.0 * matlin::unit(2, 1, 2)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(matlin::op_norm(matlin::zero(4)) == 0.0);
    CMatrix s(1, 1);
    s(0, 0) = {3.0, -4.0};
    CHECK(matlin::op_norm(s) == doctest::Approx(5.0));
    CMatrix bad = matlin::identity(2);
    bad(1, 1)   = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(matlin::op_norm(bad), InvalidInput);
}

TEST_CASE("op_norm matches the eigenvalue oracle and is submultiplicative") {
    std::mt19937_64 rng(11);
    for(int trial = 0; trial < 200; ++trial) {
        const Eigen::Index d = 1 + trial % 7;
        CMatrix            A = random_matrix(d, 1.0 + trial % 3, rng);
        CMatrix            B = random_matrix(d, 0.5 + trial % 5, rng);
        const double       nA = matlin::op_norm(A);
        CHECK(std::abs(nA - oracle::op_norm(A)) <= 1e-10 * nA);
        CHECK(matlin::op_norm(A * B) <= nA * matlin::op_norm(B) + 1e-9);
        CHECK(matlin::op_norm(A + B) <= nA + matlin::op_norm(B) + 1e-9);
    }
}

TEST_CASE("op_norm of nearly rank one 2x2 keeps relative accuracy") {
    CMatrix M(2, 2);
    M << 1.0, 1.0, 1.0, 1.0 + 1e-9;
    CHECK(std::abs(matlin::op_norm(M) - oracle::op_norm(M)) <= 1e-10 * 2.0);
    CMatrix tiny = 1e-200 * matlin::unit(2, 2, 1);
    CHECK(matlin::op_norm(tiny) == doctest::Approx(1e-200).epsilon(1e-12));
}

TEST_CASE("hermitian_dilation") {
    CHECK(matlin::hermitian_dilation(matlin::zero(3)).isZero(0.0));
    CHECK(matlin::hermitian_dilation(matlin::zero(3)).rows() == 6);
    CMatrix one(1, 1);
    one(0, 0) = 1.0;
    CMatrix expect(2, 2);
    expect << 0.0, 1.0, 1.0, 0.0;
    CHECK(dist(matlin::hermitian_dilation(one), expect) == 0.0);

    std::mt19937_64 rng(23);
    for(int trial = 0; trial < 100; ++trial) {
        const CMatrix M = random_matrix(1 + trial % 5, 0.1 + trial * 0.05, rng);
        const CMatrix H = matlin::hermitian_dilation(M);
        CHECK((H - H.adjoint()).norm() == 0.0);
        CHECK(std::abs(matlin::op_norm(H) - oracle::op_norm(M)) <= 1e-10 * oracle::op_norm(M));
    }
}

TEST_CASE("commutator") {
    std::mt19937_64 rng(3);
    const CMatrix   A = random_matrix(3, 2.0, rng);
    CHECK(matlin::commutator(A, A).isZero(0.0));

    CMatrix diag = CMatrix::Zero(2, 2);
    diag(0, 0)   = 1.0;
    diag(1, 1)   = -1.0;
    CHECK(dist(matlin::commutator(matlin::unit(2, 1, 2), matlin::unit(2, 2, 1)), diag) == 0.0);

    CMatrix D1 = CMatrix::Zero(2, 2), D2 = CMatrix::Zero(2, 2);
    D1.diagonal() << 2.0, -3.0;
    D2.diagonal() << 0.5, 7.0;
    CHECK(matlin::commutator(D1, D2).isZero(0.0));

    for(int trial = 0; trial < 50; ++trial) {
        const CMatrix X = random_matrix(4, 1.5, rng), Y = random_matrix(4, 0.7, rng);
        CHECK(matlin::op_norm(matlin::commutator(X, Y)) <= 2 * 1.5 * 0.7 + 1e-9);
    }
    CHECK_THROWS_AS(matlin::commutator(matlin::identity(2), matlin::identity(3)), DimensionMismatch);
}

TEST_CASE("unit matrices are 1-based") {
    const CMatrix E = matlin::unit(3, 2, 3);
    CHECK(E(1, 2) == Scalar(1.0));
    CHECK(E.cwiseAbs().sum() == 1.0);
    CHECK_THROWS_AS(matlin::unit(2, 0, 1), InvalidInput);
    CHECK_THROWS_AS(matlin::unit(2, 3, 1), InvalidInput);
}
