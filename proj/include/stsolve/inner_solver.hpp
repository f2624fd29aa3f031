#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stsolve/dense_matrix.hpp"
#include "stsolve/random.hpp"

namespace stsolve {

struct EmbeddingOptions {
    double eps = 0.5;
    double delta = 0.01;
    double c_phi = 4.0;
    double c_s = 2.0;
};

// phi x n matrix with exactly s nonzeros of value +-1/sqrt(s) in every column.
struct SparseEmbedding {
    Index phi = 0;
    Index n = 0;
    Index s = 0;
    std::vector<std::uint32_t> rows;  // n*s row positions, column j at [j*s, (j+1)*s)
    std::vector<double> values;       // matching +-1/sqrt(s)
};

Index embedding_rows(Index d, const EmbeddingOptions& opt);
Index embedding_nonzeros(Index d, const EmbeddingOptions& opt);

SparseEmbedding build_embedding(Index n, Index d, const EmbeddingOptions& opt, Rng& rng);
// Phi X for X with n rows.
DenseMatrix apply_embedding(const SparseEmbedding& phi, const DenseMatrix& X);
Vector apply_embedding(const SparseEmbedding& phi, std::span<const double> x);
// Phi Atilᵀ for Atil with n columns, without forming the transpose.
DenseMatrix apply_embedding_to_transpose(const SparseEmbedding& phi, const DenseMatrix& Atil);

struct PreconditionerOptions {
    EmbeddingOptions embedding;
    double rank_tol = 1e-12;
};

// M = V Sigma^{-1} from the compact SVD of Phi Atilᵀ.
struct Preconditioner {
    DenseMatrix M;             // tau x rank
    Vector sketch_singular_values;
    bool exact_sketch = false;  // the embedding would not compress, so Phi = I was used
    Index rank() const noexcept { return M.cols(); }
};

Preconditioner build_preconditioner(const DenseMatrix& Atil, const PreconditionerOptions& opt, Rng& rng);
// Variant with a caller-supplied embedding (phi.n must equal Atil.cols()).
Preconditioner build_preconditioner(const DenseMatrix& Atil, const SparseEmbedding& phi, double rank_tol = 1e-12);
// Exact whitening (Phi = I).
Preconditioner build_exact_preconditioner(const DenseMatrix& Atil, double rank_tol = 1e-12);

// Implicit operator B: apply maps cols -> rows, apply_transpose maps rows -> cols.
struct LinearOperator {
    Index rows = 0;
    Index cols = 0;
    std::function<Vector(std::span<const double>)> apply;
    std::function<Vector(std::span<const double>)> apply_transpose;
};

LinearOperator dense_operator(const DenseMatrix& B);  // keeps a reference to B
LinearOperator dense_operator(DenseMatrix&&) = delete;

struct CgResult {
    Vector u;
    Index iterations = 0;
    bool breakdown = false;
};

// CG on B Bᵀ u = rhs from u = 0, using only products with B and Bᵀ.
CgResult cg_normal_second_kind(const LinearOperator& B, std::span<const double> rhs, Index s_max);

struct ProjectStep {
    Vector w;  // Atilᵀ M u
    Vector u;
    Index cg_iterations = 0;
    bool breakdown = false;
};

// Approximately solves min ||w|| s.t. Atil w = btil via CG on Mᵀ Atil Atilᵀ M u = Mᵀ btil.
ProjectStep approx_project_step(const DenseMatrix& Atil, std::span<const double> btil, const Preconditioner& M,
                                Index s_max);

}  // namespace stsolve
