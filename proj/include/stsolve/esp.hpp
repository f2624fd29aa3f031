#pragma once

#include <span>

#include "stsolve/dense_matrix.hpp"
#include "stsolve/linalg.hpp"

namespace stsolve {

// values[l] = e_l(lambda) for l = 0..m, with e_0 = 1.
struct EspTable {
    Vector values;
    double operator[](Index l) const { return l < values.size() ? values[l] : 0.0; }
    Index order() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

EspTable esp_all(std::span<const double> lambda);

// Table over lambda with entry i removed. Downdates the full table and falls
// back to a fresh pass when the downdate cancels badly.
EspTable esp_leave_one_out(std::span<const double> lambda, const EspTable& full, Index i);

// Orthogonal projector onto the row space of the rows of A listed in S.
DenseMatrix projection_matrix(const DenseMatrix& A, std::span<const Index> S);

// E[P_S] for S drawn from the k-DPP with kernel A Aᵀ, in closed form.
DenseMatrix expected_projection_exact(const DenseMatrix& A, Index k);
// Same quantity by summing over all k-subsets; an independent check of the closed form.
DenseMatrix expected_projection_enumerated(const DenseMatrix& A, Index k);

// (k' - k) / (k' - k - 1 + (r - k) * kappa_k^2), for k < k' < r.
double projection_lower_bound(const SpectralProfile& profile, Index k, Index k_prime);
// 1 / ((r - k' + 1) * kappa_{k'-1}^2), the single-index form.
double projection_lower_bound_single(const SpectralProfile& profile, Index k_prime);

// Checks e_{tau+1}/e_tau <= (1/(tau+1-j)) * sum_{i>j} lambda_i for decreasing lambda.
bool esp_ratio_bound_check(std::span<const double> lambda, Index tau, Index j);

}  // namespace stsolve
