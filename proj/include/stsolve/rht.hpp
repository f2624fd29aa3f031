#pragma once

#include <span>

#include "stsolve/dense_matrix.hpp"
#include "stsolve/random.hpp"

namespace stsolve {

// Q = (1/sqrt(p)) H D acting on vectors zero-padded from original_dim to p.
struct RhtOperator {
    Index dim = 0;         // p, a power of two
    Vector signs;          // p entries, each +1 or -1
    Index original_dim = 0;
};

Index next_power_of_two(Index n);
bool is_power_of_two(Index n) noexcept;

RhtOperator make_rht(Index original_dim, Rng& rng);

// v <- H v by the butterfly recursion; unnormalized.
void fwht_inplace(std::span<double> v);

// Q [A; 0]: pads A to p rows and mixes rows. Output is p x cols.
DenseMatrix apply_left(const RhtOperator& op, const DenseMatrix& A);
// [A 0] Qᵀ: pads A to p columns and mixes columns. Output is rows x p.
DenseMatrix apply_right(const RhtOperator& op, const DenseMatrix& A);
// Q [x; 0]
Vector apply_forward(const RhtOperator& op, std::span<const double> x);
// First original_dim entries of Qᵀ z.
Vector pull_back_solution(const RhtOperator& op, std::span<const double> z);

// Dense p x p matrix Q; intended for tests on small p.
DenseMatrix materialize(const RhtOperator& op);

}  // namespace stsolve
