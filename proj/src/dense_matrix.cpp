#include "stsolve/dense_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace stsolve {

DenseMatrix::DenseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(Index rows, Index cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
        throw std::invalid_argument("DenseMatrix: data length does not match rows*cols");
    if (!all_finite()) throw std::invalid_argument("DenseMatrix: non-finite entry");
}

DenseMatrix DenseMatrix::identity(Index n) {
    DenseMatrix I(n, n);
    for (Index i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
    DenseMatrix D(d.size(), d.size());
    for (Index i = 0; i < d.size(); ++i) D(i, i) = d[i];
    return D;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const Index m = rows.size();
    const Index n = m ? rows.begin()->size() : 0;
    std::vector<double> data;
    data.reserve(m * n);
    for (const auto& r : rows) {
        if (r.size() != n) throw std::invalid_argument("DenseMatrix::from_rows: ragged rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return DenseMatrix(m, n, std::move(data));
}

bool DenseMatrix::all_finite() const noexcept {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace stsolve
