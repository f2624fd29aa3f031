#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace stsolve {

using Vector = std::vector<double>;
using Index = std::size_t;

// Row-major dense matrix of doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(Index rows, Index cols);
    DenseMatrix(Index rows, Index cols, std::vector<double> data);

    static DenseMatrix identity(Index n);
    static DenseMatrix diagonal(std::span<const double> d);
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    Index size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(Index i, Index j) noexcept { return data_[i * cols_ + j]; }
    double operator()(Index i, Index j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(Index i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(Index i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    const std::vector<double>& values() const noexcept { return data_; }

    bool all_finite() const noexcept;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<double> data_;
};

}  // namespace stsolve
