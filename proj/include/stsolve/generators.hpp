#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "stsolve/dense_matrix.hpp"
#include "stsolve/solvers.hpp"

namespace stsolve {

enum class Consistency { Consistent, Inconsistent };

std::string to_string(Consistency c);
Consistency parse_consistency(const std::string& s);

struct ProblemSpec {
    Index m = 64;
    Index n = 64;
    Index k = 4;                // number of head singular values
    double head_cond = 100.0;   // sigma_1 / sigma_k
    double tail_spread = 1.0;   // target tail condition past index k
    double head_floor = 10.0;   // sigma_k over the largest tail value
    double noise = 0.0;         // relative size of the residual added off the range
    Consistency consistency = Consistency::Consistent;
    std::uint64_t seed = 0;
};

struct Problem {
    DenseMatrix A;
    Vector b;
    Vector x_star;           // minimum-norm least-squares solution
    Vector singular_values;  // the prescribed spectrum, nonincreasing
};

// Singular values for a problem spec: tail_spread on the last r - k values
// (smallest equal to 1) and a log-spaced head above it.
Vector spiked_spectrum(const ProblemSpec& spec);

// A = U diag(sigma) Vᵀ with Haar-like orthonormal factors.
Problem gen_spiked(const ProblemSpec& spec);

// Symmetric PSD n x n matrix with the given eigenvalues (nonincreasing, zeros allowed).
DenseMatrix gen_psd(std::span<const double> eigenvalues, std::uint64_t seed);

// CGLS on AᵀA x = Aᵀb from x = 0. Stops when ||Ax - b||^2 <= eps ||b||^2,
// when the normal-equation residual falls below eps ||Aᵀb||, or at max_iter.
SolveReport baseline_cg(const DenseMatrix& A, std::span<const double> b, double eps, Index max_iter,
                        const std::optional<Vector>& reference = std::nullopt);

// A† b by compact SVD. Requires min(m, n) <= 2048.
Vector baseline_direct(const DenseMatrix& A, std::span<const double> b);

}  // namespace stsolve
