#pragma once

#include <iosfwd>
#include <string>

#include "stsolve/dense_matrix.hpp"

namespace stsolve {

enum class MatrixFormat { MatrixMarket, Binary };

MatrixFormat parse_format(const std::string& name);  // "mm" or "bin"
std::string format_extension(MatrixFormat f);        // ".mtx" or ".bin"

// MatrixMarket: reads coordinate (real/integer/pattern) and array layouts,
// general or symmetric.
DenseMatrix read_matrix_market(std::istream& in);
DenseMatrix read_matrix_market(const std::string& path);
// Writes the array layout, or the coordinate layout skipping zeros.
void write_matrix_market(std::ostream& out, const DenseMatrix& A, bool coordinate = false);
void write_matrix_market(const std::string& path, const DenseMatrix& A, bool coordinate = false);

// STSV1 binary: magic "STSV1", u64 rows, u64 cols, rows*cols little-endian
// doubles in row-major order.
DenseMatrix read_binary(std::istream& in);
DenseMatrix read_binary(const std::string& path);
void write_binary(std::ostream& out, const DenseMatrix& A);
void write_binary(const std::string& path, const DenseMatrix& A);

// Detects the format from the leading bytes.
DenseMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const DenseMatrix& A, MatrixFormat format);

// Vectors travel as single-column matrices; a single row is also accepted on load.
Vector load_vector(const std::string& path);
void save_vector(const std::string& path, const Vector& v, MatrixFormat format);

}  // namespace stsolve
