#include "stsolve/esp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stsolve/sampling.hpp"

namespace stsolve {

namespace {

Vector esp_pass(std::span<const double> lambda, Index skip) {
    const Index m = lambda.size();
    Vector e(m + 1 - (skip < m ? 1 : 0), 0.0);
    e[0] = 1.0;
    Index seen = 0;
    for (Index i = 0; i < m; ++i) {
        if (i == skip) continue;
        ++seen;
        for (Index l = seen; l >= 1; --l) e[l] += lambda[i] * e[l - 1];
    }
    return e;
}

}  // namespace

EspTable esp_all(std::span<const double> lambda) {
    for (double v : lambda)
        if (v < -1e-12) throw std::invalid_argument("esp_all: negative entry");
    Vector clean(lambda.begin(), lambda.end());
    for (double& v : clean) v = std::max(v, 0.0);
    return EspTable{esp_pass(clean, clean.size())};
}

EspTable esp_leave_one_out(std::span<const double> lambda, const EspTable& full, Index i) {
    const Index m = lambda.size();
    if (i >= m || full.values.size() != m + 1) throw std::invalid_argument("esp_leave_one_out: bad arguments");
    const double li = std::max(lambda[i], 0.0);
    Vector e(m, 0.0);
    e[0] = 1.0;
    bool stable = true;
    for (Index l = 1; l < m && stable; ++l) {
        const double removed = li * e[l - 1];
        e[l] = full.values[l] - removed;
        if (removed > 0.5 * full.values[l] || e[l] < 0.0) stable = false;
    }
    if (stable) return EspTable{std::move(e)};
    Vector clean(lambda.begin(), lambda.end());
    for (double& v : clean) v = std::max(v, 0.0);
    return EspTable{esp_pass(clean, i)};
}

DenseMatrix projection_matrix(const DenseMatrix& A, std::span<const Index> S) {
    const DenseMatrix rows = gather_rows(A, S);
    bool zero = true;
    for (double v : rows.values()) zero = zero && v == 0.0;
    if (S.empty() || zero) return DenseMatrix(A.cols(), A.cols());
    const CompactSvd svd = compact_svd(rows);
    return matmat(svd.V, transpose(svd.V));
}

DenseMatrix expected_projection_exact(const DenseMatrix& A, Index k) {
    const Index m = A.rows();
    if (m > 16) throw std::invalid_argument("expected_projection_exact: limited to m <= 16");
    if (k < 1 || k > m) throw std::invalid_argument("expected_projection_exact: need 1 <= k <= m");
    const SymmetricEigen e = symmetric_eigen(matmat(A, transpose(A)));
    const double lmax = std::max(e.values.front(), 0.0);
    Vector lambda(e.values);
    for (double& v : lambda)
        if (v <= 1e-12 * lmax) v = 0.0;
    const EspTable full = esp_all(lambda);
    if (!(full[k] > 0.0)) throw std::domain_error("k above rank");

    // W = U diag(e_{k-1}(lambda_{-i}) / e_k(lambda)) Uᵀ
    DenseMatrix W(m, m);
    for (Index i = 0; i < m; ++i) {
        const double d = esp_leave_one_out(lambda, full, i)[k - 1] / full[k];
        for (Index a = 0; a < m; ++a) {
            const double ua = e.vectors(a, i) * d;
            for (Index b = 0; b < m; ++b) W(a, b) += ua * e.vectors(b, i);
        }
    }
    DenseMatrix E = matmat_tn(A, matmat(W, A));
    for (Index a = 0; a < E.rows(); ++a)
        for (Index b = a + 1; b < E.cols(); ++b) E(a, b) = E(b, a) = 0.5 * (E(a, b) + E(b, a));
    return E;
}

DenseMatrix expected_projection_enumerated(const DenseMatrix& A, Index k) {
    const Pmf pmf = kdpp_pmf_bruteforce(DppKernel::from_factor(A), k);
    DenseMatrix E(A.cols(), A.cols());
    for (const auto& [set, p] : pmf) {
        if (p == 0.0) continue;
        const DenseMatrix P = projection_matrix(A, set.indices);
        for (Index i = 0; i < E.size(); ++i) E.data()[i] += p * P.data()[i];
    }
    return E;
}

double projection_lower_bound(const SpectralProfile& profile, Index k, Index k_prime) {
    const Index r = profile.rank;
    if (!(k < k_prime && k_prime < r)) throw std::invalid_argument("projection_lower_bound: need k < k' < r");
    const double kappa = tail_condition(profile, k);
    return double(k_prime - k) / (double(k_prime - k - 1) + double(r - k) * kappa * kappa);
}

double projection_lower_bound_single(const SpectralProfile& profile, Index k_prime) {
    const Index r = profile.rank;
    if (!(k_prime >= 1 && k_prime < r)) throw std::invalid_argument("projection_lower_bound_single: need 1 <= k' < r");
    const double kappa = tail_condition(profile, k_prime - 1);
    return 1.0 / (double(r - k_prime + 1) * kappa * kappa);
}

bool esp_ratio_bound_check(std::span<const double> lambda, Index tau, Index j) {
    if (!(tau >= j && j > 0 && tau + 1 <= lambda.size()))
        throw std::invalid_argument("esp_ratio_bound_check: need tau >= j > 0 and tau + 1 <= len");
    for (Index i = 1; i < lambda.size(); ++i)
        if (lambda[i] > lambda[i - 1]) throw std::invalid_argument("esp_ratio_bound_check: lambda must be decreasing");
    const EspTable e = esp_all(lambda);
    if (e[tau] == 0.0) return true;
    double tail = 0.0;
    for (Index i = j; i < lambda.size(); ++i) tail += lambda[i];
    const double lhs = e[tau + 1] / e[tau];
    const double rhs = tail / double(tau + 1 - j);
    return lhs <= rhs * (1.0 + 1e-12);
}

}  // namespace stsolve
