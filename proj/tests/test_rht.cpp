#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "stsolve/linalg.hpp"
#include "stsolve/rht.hpp"

using namespace stsolve;

namespace {

// Sylvester recursion H_{2n} = [[H, H], [H, -H]].
Eigen::MatrixXd hadamard(Index p) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Ones(1, 1);
    while (static_cast<Index>(H.rows()) < p) {
        const auto n = H.rows();
        Eigen::MatrixXd G(2 * n, 2 * n);
        G << H, H, H, -H;
        H = G;
    }
    return H;
}

RhtOperator plus_signs(Index p) {
    RhtOperator op;
    op.dim = p;
    op.original_dim = p;
    op.signs.assign(p, 1.0);
    return op;
}

}  // namespace

TEST(Fwht, SmallExamples) {
    Vector a = {1, 0};
    fwht_inplace(a);
    EXPECT_EQ(a, (Vector{1, 1}));
    Vector b = {1, 1};
    fwht_inplace(b);
    EXPECT_EQ(b, (Vector{2, 0}));
    Vector e(8, 0.0);
    e[0] = 1.0;
    fwht_inplace(e);
    EXPECT_EQ(e, Vector(8, 1.0));
}

TEST(Fwht, RejectsNonPowerOfTwo) {
    Vector v(6, 1.0);
    EXPECT_THROW(fwht_inplace(v), std::invalid_argument);
}

TEST(Fwht, MatchesDenseHadamard) {
    Rng rng(1);
    for (Index p = 1; p <= 1024; p *= 2) {
        const Vector v = oracle::gaussian_vec(p, rng);
        Vector w = v;
        fwht_inplace(w);
        const Eigen::VectorXd ref = hadamard(p) * oracle::to_eigen(v);
        EXPECT_LE((oracle::to_eigen(w) - ref).cwiseAbs().maxCoeff(), 1e-11 * std::sqrt(double(p)));
    }
}

TEST(Rht, PaddingAndSigns) {
    Rng rng(2);
    EXPECT_EQ(next_power_of_two(1), 1u);
    EXPECT_EQ(next_power_of_two(5), 8u);
    EXPECT_EQ(next_power_of_two(64), 64u);
    const RhtOperator op = make_rht(37, rng);
    EXPECT_EQ(op.dim, 64u);
    EXPECT_EQ(op.original_dim, 37u);
    for (double s : op.signs) EXPECT_TRUE(s == 1.0 || s == -1.0);
}

TEST(Rht, ApplyLeftExample) {
    const DenseMatrix e1 = DenseMatrix::from_rows({{1}, {0}});
    const DenseMatrix out = apply_left(plus_signs(2), e1);
    EXPECT_NEAR(out(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(out(1, 0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Rht, ApplyRightExample) {
    const DenseMatrix e1 = DenseMatrix::from_rows({{1, 0}});
    const DenseMatrix out = apply_right(plus_signs(2), e1);
    EXPECT_NEAR(out(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(out(0, 1), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Rht, PullBackExample) {
    RhtOperator op = plus_signs(2);
    op.signs = {1.0, -1.0};
    const Vector x = pull_back_solution(op, Vector{1, 0});
    EXPECT_NEAR(x[0], 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(x[1], -1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(pull_back_solution(op, Vector{0, 0}), (Vector{0, 0}));
}

TEST(Rht, OrthogonalForManySizes) {
    Rng rng(3);
    for (Index n = 1; n <= 256; n = n * 2 + 1) {
        const RhtOperator op = make_rht(n, rng);
        const Eigen::MatrixXd Q = oracle::to_eigen(materialize(op));
        EXPECT_LE((Q.transpose() * Q - Eigen::MatrixXd::Identity(Q.rows(), Q.cols())).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Rht, MaterializeMatchesDefinition) {
    Rng rng(4);
    const RhtOperator op = make_rht(8, rng);
    const Eigen::MatrixXd D = oracle::to_eigen(op.signs).asDiagonal();
    const Eigen::MatrixXd ref = hadamard(8) * D / std::sqrt(8.0);
    EXPECT_LE((oracle::to_eigen(materialize(op)) - ref).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Rht, RoundTripsAndPreservesSpectrum) {
    Rng rng(5);
    const DenseMatrix A = oracle::gaussian(13, 6, rng);
    const RhtOperator op = make_rht(13, rng);
    const DenseMatrix QA = apply_left(op, A);
    EXPECT_EQ(QA.rows(), 16u);
    const Vector s0 = spectral_profile(A).singular_values, s1 = spectral_profile(QA).singular_values;
    ASSERT_EQ(s0.size(), s1.size());
    for (Index i = 0; i < s0.size(); ++i) EXPECT_NEAR(s0[i], s1[i], 1e-10 * s0[0]);
    for (Index j = 0; j < A.cols(); ++j) {
        Vector col(16);
        for (Index i = 0; i < 16; ++i) col[i] = QA(i, j);
        const Vector back = pull_back_solution(op, col);
        for (Index i = 0; i < 13; ++i) EXPECT_NEAR(back[i], A(i, j), 1e-12);
    }
    const Vector x = oracle::gaussian_vec(13, rng);
    const Vector rt = pull_back_solution(op, apply_forward(op, x));
    for (Index i = 0; i < 13; ++i) EXPECT_NEAR(rt[i], x[i], 1e-12);
}

TEST(Rht, ApplyRightPreservesFrobeniusAndInverts) {
    Rng rng(6);
    const DenseMatrix A = oracle::gaussian(4, 11, rng);
    const RhtOperator op = make_rht(11, rng);
    const DenseMatrix AQ = apply_right(op, A);
    EXPECT_NEAR(frobenius_norm(AQ), frobenius_norm(A), 1e-12 * frobenius_norm(A));
    const Eigen::MatrixXd Q = oracle::to_eigen(materialize(op));
    Eigen::MatrixXd pad = Eigen::MatrixXd::Zero(4, 16);
    pad.leftCols(11) = oracle::to_eigen(A);
    EXPECT_LE((oracle::to_eigen(AQ) - pad * Q.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}
