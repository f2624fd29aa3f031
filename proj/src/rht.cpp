#include "stsolve/rht.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "stsolve/flops.hpp"

namespace stsolve {

namespace {

std::uint64_t log2_exact(Index p) { return static_cast<std::uint64_t>(std::countr_zero(p)); }

// Butterflies across the rows of a row-major p x n block.
void fwht_rows(double* data, Index p, Index n) {
    for (Index h = 1; h < p; h *= 2) {
        for (Index i = 0; i < p; i += 2 * h) {
            for (Index j = i; j < i + h; ++j) {
                double* a = data + j * n;
                double* b = data + (j + h) * n;
                for (Index c = 0; c < n; ++c) {
                    const double x = a[c], y = b[c];
                    a[c] = x + y;
                    b[c] = x - y;
                }
            }
        }
    }
    flops::add(static_cast<std::uint64_t>(p) * log2_exact(p) * n);
}

void check(const RhtOperator& op) {
    if (!is_power_of_two(op.dim) || op.signs.size() != op.dim || op.original_dim > op.dim)
        throw std::invalid_argument("malformed RhtOperator");
}

}  // namespace

bool is_power_of_two(Index n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

Index next_power_of_two(Index n) { return n <= 1 ? 1 : std::bit_ceil(n); }

RhtOperator make_rht(Index original_dim, Rng& rng) {
    if (original_dim == 0) throw std::invalid_argument("make_rht: dimension must be positive");
    RhtOperator op;
    op.original_dim = original_dim;
    op.dim = next_power_of_two(original_dim);
    op.signs.resize(op.dim);
    for (double& s : op.signs) s = rng.rademacher();
    return op;
}

void fwht_inplace(std::span<double> v) {
    if (!is_power_of_two(v.size())) throw std::invalid_argument("fwht: length must be a power of two");
    fwht_rows(v.data(), v.size(), 1);
}

DenseMatrix apply_left(const RhtOperator& op, const DenseMatrix& A) {
    check(op);
    if (A.rows() != op.original_dim) throw std::invalid_argument("apply_left: row count mismatch");
    const Index p = op.dim, n = A.cols();
    DenseMatrix out(p, n);
    const double scale = 1.0 / std::sqrt(double(p));
    for (Index i = 0; i < A.rows(); ++i) {
        const double s = op.signs[i] * scale;
        const double* a = A.data() + i * n;
        double* o = out.data() + i * n;
        for (Index j = 0; j < n; ++j) o[j] = s * a[j];
    }
    fwht_rows(out.data(), p, n);
    return out;
}

DenseMatrix apply_right(const RhtOperator& op, const DenseMatrix& A) {
    check(op);
    if (A.cols() != op.original_dim) throw std::invalid_argument("apply_right: column count mismatch");
    const Index p = op.dim, n = A.cols();
    DenseMatrix out(A.rows(), p);
    const double scale = 1.0 / std::sqrt(double(p));
    for (Index i = 0; i < A.rows(); ++i) {
        const double* a = A.data() + i * n;
        double* o = out.data() + i * p;
        for (Index j = 0; j < n; ++j) o[j] = op.signs[j] * scale * a[j];
        fwht_rows(o, p, 1);
    }
    return out;
}

Vector apply_forward(const RhtOperator& op, std::span<const double> x) {
    check(op);
    if (x.size() != op.original_dim) throw std::invalid_argument("apply_forward: length mismatch");
    Vector out(op.dim, 0.0);
    const double scale = 1.0 / std::sqrt(double(op.dim));
    for (Index i = 0; i < x.size(); ++i) out[i] = op.signs[i] * scale * x[i];
    fwht_rows(out.data(), op.dim, 1);
    return out;
}

Vector pull_back_solution(const RhtOperator& op, std::span<const double> z) {
    check(op);
    if (z.size() != op.dim) throw std::invalid_argument("pull_back_solution: length mismatch");
    Vector w(z.begin(), z.end());
    fwht_rows(w.data(), op.dim, 1);
    const double scale = 1.0 / std::sqrt(double(op.dim));
    Vector out(op.original_dim);
    for (Index i = 0; i < op.original_dim; ++i) out[i] = op.signs[i] * scale * w[i];
    return out;
}

DenseMatrix materialize(const RhtOperator& op) {
    check(op);
    RhtOperator full = op;
    full.original_dim = op.dim;
    return apply_left(full, DenseMatrix::identity(op.dim));
}

}  // namespace stsolve
