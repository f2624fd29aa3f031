#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "stsolve/flops.hpp"
#include "stsolve/linalg.hpp"

using namespace stsolve;

TEST(DenseMatrix, RejectsWrongLength) {
    EXPECT_THROW(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST(DenseMatrix, RejectsNonFinite) {
    EXPECT_THROW(DenseMatrix(1, 2, {1.0, std::nan("")}), std::invalid_argument);
    EXPECT_THROW(DenseMatrix(1, 1, {INFINITY}), std::invalid_argument);
}

TEST(Matvec, Identity) {
    const Vector y = matvec(DenseMatrix::identity(3), Vector{1, 2, 3});
    EXPECT_EQ(y, (Vector{1, 2, 3}));
}

TEST(Matvec, ZeroMatrix) {
    EXPECT_EQ(matvec(DenseMatrix(2, 2), Vector{5, 7}), (Vector{0, 0}));
}

TEST(Matvec, HandExpansion) {
    const DenseMatrix A = DenseMatrix::from_rows({{1, 2}, {3, 4}});
    EXPECT_EQ(matvec(A, Vector{1, 1}), (Vector{3, 7}));
}

TEST(Matvec, DimensionMismatchThrows) {
    EXPECT_THROW(matvec(DenseMatrix(2, 3), Vector{1, 2}), std::invalid_argument);
    EXPECT_THROW(matvec_transpose(DenseMatrix(2, 3), Vector{1, 2, 3}), std::invalid_argument);
}

TEST(Matvec, UnitVectorsGiveColumns) {
    Rng rng(11);
    const DenseMatrix A = oracle::gaussian(5, 7, rng);
    for (Index j = 0; j < 7; ++j) {
        Vector e(7, 0.0);
        e[j] = 1.0;
        const Vector col = matvec(A, e);
        for (Index i = 0; i < 5; ++i) EXPECT_EQ(col[i], A(i, j));
    }
}

TEST(Matvec, CountsMultiplyAdds) {
    const std::uint64_t before = flops::count();
    matvec(DenseMatrix(4, 6), Vector(6, 1.0));
    EXPECT_EQ(flops::count() - before, 24u);
}

TEST(MonitorScope, MovesWorkToMonitorCounter) {
    const std::uint64_t before = flops::count(), mon = flops::monitor_count();
    {
        flops::MonitorScope scope;
        matvec(DenseMatrix(3, 3), Vector(3, 1.0));
    }
    EXPECT_EQ(flops::count(), before);
    EXPECT_EQ(flops::monitor_count() - mon, 9u);
}

TEST(Matmat, MatchesEigen) {
    Rng rng(3);
    const DenseMatrix A = oracle::gaussian(6, 4, rng), B = oracle::gaussian(4, 5, rng), C = oracle::gaussian(6, 5, rng);
    EXPECT_LE((oracle::to_eigen(matmat(A, B)) - oracle::to_eigen(A) * oracle::to_eigen(B)).norm(), 1e-12);
    EXPECT_LE((oracle::to_eigen(matmat_tn(A, C)) - oracle::to_eigen(A).transpose() * oracle::to_eigen(C)).norm(),
              1e-12);
}

TEST(Gather, RowsAndColumns) {
    const DenseMatrix A = DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
    const std::vector<Index> idx = {0, 2};
    EXPECT_EQ(gather_rows(A, idx).values(), (Vector{1, 2, 3, 7, 8, 9}));
    EXPECT_EQ(gather_cols(A, idx).values(), (Vector{1, 3, 4, 6, 7, 9}));
    EXPECT_EQ(principal_submatrix(A, idx).values(), (Vector{1, 3, 7, 9}));
}

TEST(CompactSvd, Diagonal) {
    const Vector d = {3.0, 2.0};
    const CompactSvd s = compact_svd(DenseMatrix::diagonal(d));
    ASSERT_EQ(s.rank(), 2u);
    EXPECT_NEAR(s.S[0], 3.0, 1e-14);
    EXPECT_NEAR(s.S[1], 2.0, 1e-14);
    for (Index i = 0; i < 2; ++i) {
        EXPECT_NEAR(std::abs(s.U(i, i)), 1.0, 1e-14);
        EXPECT_NEAR(std::abs(s.V(i, i)), 1.0, 1e-14);
    }
}

TEST(CompactSvd, RankOne) {
    const DenseMatrix A = DenseMatrix::from_rows({{0, 1, 0}, {0, 0, 0}});
    const CompactSvd s = compact_svd(A);
    ASSERT_EQ(s.rank(), 1u);
    EXPECT_NEAR(s.S[0], 1.0, 1e-14);
}

TEST(CompactSvd, ZeroMatrixThrows) {
    try {
        compact_svd(DenseMatrix(3, 2));
        FAIL() << "expected an exception";
    } catch (const std::domain_error& e) {
        EXPECT_STREQ(e.what(), "zero matrix has no compact SVD");
    }
}

TEST(CompactSvd, RandomFactorsAreOrthonormalAndReconstruct) {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Index m = 1 + rng.below(64), n = 1 + rng.below(64);
        const DenseMatrix A = oracle::gaussian(m, n, rng);
        const CompactSvd s = compact_svd(A);
        const Eigen::MatrixXd U = oracle::to_eigen(s.U), V = oracle::to_eigen(s.V);
        const Eigen::Index r = static_cast<Eigen::Index>(s.rank());
        EXPECT_LE((U.transpose() * U - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((V.transpose() * V - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-10);
        const Eigen::MatrixXd rec = U * oracle::to_eigen(s.S).asDiagonal() * V.transpose();
        const Eigen::MatrixXd E = oracle::to_eigen(A);
        EXPECT_LE((rec - E).norm(), 1e-10 * E.norm());
        const Eigen::VectorXd ref = Eigen::JacobiSVD<Eigen::MatrixXd>(E).singularValues();
        for (Eigen::Index i = 0; i < r; ++i) EXPECT_NEAR(s.S[i], ref(i), 1e-10 * ref(0));
        for (Eigen::Index i = 1; i < r; ++i) EXPECT_GE(s.S[i - 1], s.S[i]);
    }
}

TEST(CompactSvd, DetectsRankDeficiency) {
    Rng rng(6);
    const DenseMatrix F = oracle::gaussian(10, 3, rng), G = oracle::gaussian(3, 8, rng);
    EXPECT_EQ(compact_svd(matmat(F, G)).rank(), 3u);
}

TEST(SymmetricEigen, MatchesEigen) {
    Rng rng(8);
    for (Index n : {1, 2, 5, 17, 40}) {
        const DenseMatrix F = oracle::gaussian(n, n, rng);
        DenseMatrix S = matmat_tn(F, F);
        const SymmetricEigen e = symmetric_eigen(S);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(oracle::to_eigen(S));
        for (Index i = 0; i < n; ++i) EXPECT_NEAR(e.values[i], ref.eigenvalues()(n - 1 - i), 1e-10 * ref.eigenvalues()(n - 1));
        const Eigen::MatrixXd Q = oracle::to_eigen(e.vectors);
        const Eigen::MatrixXd rec = Q * oracle::to_eigen(e.values).asDiagonal() * Q.transpose();
        EXPECT_LE((rec - oracle::to_eigen(S)).norm(), 1e-10 * oracle::to_eigen(S).norm());
    }
}

TEST(SymmetricPinvSolve, MatchesMinimumNormSolution) {
    Rng rng(9);
    const DenseMatrix F = oracle::gaussian(6, 3, rng);
    const DenseMatrix M = matmat(F, transpose(F));  // rank 3
    const Vector r = oracle::gaussian_vec(6, rng);
    const Vector x = symmetric_pinv_solve(M, r);
    const Eigen::VectorXd ref = oracle::pinv_solve(oracle::to_eigen(M), oracle::to_eigen(r));
    EXPECT_LE((oracle::to_eigen(x) - ref).norm(), 1e-9 * ref.norm());
}

TEST(OrthonormalFactor, SpansColumns) {
    Rng rng(10);
    const DenseMatrix A = oracle::gaussian(12, 5, rng);
    const Eigen::MatrixXd Q = oracle::to_eigen(orthonormal_factor(A));
    EXPECT_LE((Q.transpose() * Q - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-13);
    const Eigen::MatrixXd E = oracle::to_eigen(A);
    EXPECT_LE((Q * (Q.transpose() * E) - E).norm(), 1e-12 * E.norm());
}

TEST(Determinant, MatchesEigen) {
    Rng rng(12);
    for (Index n : {1, 2, 4, 7}) {
        const DenseMatrix A = oracle::gaussian(n, n, rng);
        const double ref = oracle::to_eigen(A).determinant();
        EXPECT_NEAR(determinant(A), ref, 1e-12 * std::max(1.0, std::abs(ref)));
    }
    EXPECT_EQ(determinant(DenseMatrix(3, 3)), 0.0);
}

TEST(TailCondition, Examples) {
    EXPECT_DOUBLE_EQ(tail_condition(profile_from_values({1, 1, 1, 1}, 4, 4), 0), 1.0);
    EXPECT_NEAR(tail_condition(profile_from_values({10, 2, 1}, 3, 3), 1), 1.58113883008419, 1e-12);
    EXPECT_DOUBLE_EQ(tail_condition(profile_from_values({10, 1}, 2, 2), 1), 1.0);
    EXPECT_THROW(tail_condition(profile_from_values({10, 1}, 2, 2), 2), std::invalid_argument);
}

TEST(TailCondition, NonincreasingInK) {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const SpectralProfile p = spectral_profile(oracle::gaussian(12, 9, rng));
        for (Index k = 1; k < p.rank; ++k) EXPECT_LE(tail_condition(p, k), tail_condition(p, k - 1) + 1e-12);
        for (Index k = 0; k < p.rank; ++k) EXPECT_GE(tail_condition(p, k), 1.0);
    }
}

TEST(SpectralProfile, RejectsBadValues) {
    EXPECT_THROW(profile_from_values({1, 2}, 2, 2), std::invalid_argument);
    EXPECT_THROW(profile_from_values({1, 0}, 2, 2), std::invalid_argument);
    EXPECT_THROW(profile_from_values({3, 2, 1}, 2, 5), std::invalid_argument);
}

TEST(LambdaMinPlus, Examples) {
    EXPECT_NEAR(lambda_min_plus(DenseMatrix::diagonal(Vector{0, 2, 5})), 2.0, 1e-14);
    EXPECT_NEAR(lambda_min_plus(DenseMatrix::identity(4)), 1.0, 1e-14);
    EXPECT_EQ(lambda_min_plus(DenseMatrix(3, 3)), 0.0);
    EXPECT_THROW(lambda_min_plus(DenseMatrix::from_rows({{1, 1}, {0, 1}})), std::invalid_argument);
}

TEST(LambdaMinPlus, ProjectorsGiveOne) {
    Rng rng(14);
    for (Index rank = 1; rank <= 3; ++rank) {
        const DenseMatrix Q = orthonormal_factor(oracle::gaussian(3, rank, rng));
        const DenseMatrix P = matmat(Q, transpose(Q));
        DenseMatrix Psym(3, 3);
        for (Index i = 0; i < 3; ++i)
            for (Index j = 0; j < 3; ++j) Psym(i, j) = 0.5 * (P(i, j) + P(j, i));
        EXPECT_NEAR(lambda_min_plus(Psym), 1.0, 1e-12);
    }
}
