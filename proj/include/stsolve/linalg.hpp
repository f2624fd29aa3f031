#pragma once

#include <span>
#include <vector>

#include "stsolve/dense_matrix.hpp"

namespace stsolve {

// Vector kernels.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);  // y += alpha x
Vector subtract(std::span<const double> x, std::span<const double> y);

// y = A x
Vector matvec(const DenseMatrix& A, std::span<const double> x);
// y = Aᵀ x
Vector matvec_transpose(const DenseMatrix& A, std::span<const double> x);
// C = A B
DenseMatrix matmat(const DenseMatrix& A, const DenseMatrix& B);
// C = Aᵀ B
DenseMatrix matmat_tn(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix transpose(const DenseMatrix& A);

DenseMatrix gather_rows(const DenseMatrix& A, std::span<const Index> rows);
DenseMatrix gather_cols(const DenseMatrix& A, std::span<const Index> cols);
DenseMatrix principal_submatrix(const DenseMatrix& A, std::span<const Index> idx);

double frobenius_norm(const DenseMatrix& A);
double max_abs_diff(const DenseMatrix& A, const DenseMatrix& B);

struct CompactSvd {
    DenseMatrix U;  // m x r, orthonormal columns
    Vector S;       // r values, positive and nonincreasing
    DenseMatrix V;  // n x r, orthonormal columns
    Index rank() const noexcept { return S.size(); }
};

// One-sided Jacobi SVD. Singular values at or below rank_tol * sigma_max are
// dropped. Throws on the zero matrix.
CompactSvd compact_svd(const DenseMatrix& A, double rank_tol = 1e-12);

struct SymmetricEigen {
    Vector values;        // nonincreasing
    DenseMatrix vectors;  // columns are eigenvectors
};

// Symmetric eigensolver (tridiagonal reduction + implicit QL); reads the upper triangle.
SymmetricEigen symmetric_eigen(const DenseMatrix& M);

// Minimum-norm solution of M x = r for symmetric PSD M, discarding eigenvalues
// at or below rank_tol * lambda_max.
Vector symmetric_pinv_solve(const DenseMatrix& M, std::span<const double> r, double rank_tol = 1e-12);

// Thin Q factor (m x n, m >= n) of a Householder QR.
DenseMatrix orthonormal_factor(const DenseMatrix& A);

// Determinant by LU with partial pivoting.
double determinant(const DenseMatrix& A);

struct SpectralProfile {
    Vector singular_values;  // sigma_1 >= ... >= sigma_r > 0
    Index rank = 0;
    Index m = 0;
    Index n = 0;
};

SpectralProfile spectral_profile(const DenseMatrix& A, double rank_tol = 1e-12);
SpectralProfile profile_from_values(Vector singular_values, Index m, Index n);

// Averaged tail condition number of the singular values past index k.
double tail_condition(const SpectralProfile& profile, Index k);

// Smallest eigenvalue of M strictly above tol * lambda_max; zero when M vanishes.
double lambda_min_plus(const DenseMatrix& M, double tol = 1e-10);

// Largest over smallest singular value.
double condition_number(const DenseMatrix& A, double rank_tol = 1e-12);

}  // namespace stsolve
