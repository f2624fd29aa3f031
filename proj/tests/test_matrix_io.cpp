#include <gtest/gtest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "oracle.hpp"
#include "stsolve/matrix_io.hpp"

using namespace stsolve;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("stsolve_io_" + name)).string();
}

}  // namespace

TEST(MatrixMarket, ArrayRoundTripIsExact) {
    Rng rng(1);
    const DenseMatrix A = oracle::gaussian(4, 3, rng);
    std::stringstream ss;
    write_matrix_market(ss, A);
    EXPECT_EQ(read_matrix_market(ss).values(), A.values());
}

TEST(MatrixMarket, CoordinateRoundTripIsExact) {
    const DenseMatrix A = DenseMatrix::from_rows({{0, 1.5, 0}, {-2.25, 0, 1e-300}});
    std::stringstream ss;
    write_matrix_market(ss, A, true);
    const DenseMatrix B = read_matrix_market(ss);
    EXPECT_EQ(B.rows(), 2u);
    EXPECT_EQ(B.cols(), 3u);
    EXPECT_EQ(B.values(), A.values());
}

TEST(MatrixMarket, ReadsSymmetricCoordinate) {
    std::stringstream ss(
        "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 3\n1 1 2.0\n2 1 -1.0\n3 3 4.0\n");
    const DenseMatrix A = read_matrix_market(ss);
    EXPECT_EQ(A(0, 0), 2.0);
    EXPECT_EQ(A(0, 1), -1.0);
    EXPECT_EQ(A(1, 0), -1.0);
    EXPECT_EQ(A(2, 2), 4.0);
    EXPECT_EQ(A(1, 1), 0.0);
}

TEST(MatrixMarket, ReadsPatternAndArrayColumnMajor) {
    std::stringstream pat("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n2 1\n");
    const DenseMatrix P = read_matrix_market(pat);
    EXPECT_EQ(P.values(), (Vector{0, 1, 1, 0}));
    std::stringstream arr("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
    EXPECT_EQ(read_matrix_market(arr).values(), (Vector{1, 3, 2, 4}));
}

TEST(MatrixMarket, RejectsMalformedInput) {
    std::stringstream bad("not a header\n1 1\n1\n");
    EXPECT_ANY_THROW(read_matrix_market(bad));
    std::stringstream truncated("%%MatrixMarket matrix array real general\n2 2\n1\n2\n");
    EXPECT_ANY_THROW(read_matrix_market(truncated));
}

TEST(Binary, LayoutMatchesFormat) {
    const DenseMatrix A = DenseMatrix::from_rows({{1, 2}});
    std::stringstream ss;
    write_binary(ss, A);
    const std::string bytes = ss.str();
    ASSERT_EQ(bytes.size(), 5u + 8u + 8u + 16u);
    EXPECT_EQ(bytes.substr(0, 5), "STSV1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 1u);   // rows, little-endian
    EXPECT_EQ(static_cast<unsigned char>(bytes[13]), 2u);  // cols
    double first = 0.0;
    std::memcpy(&first, bytes.data() + 21, 8);
    EXPECT_EQ(first, 1.0);
}

TEST(Binary, RoundTripAndTruncation) {
    Rng rng(2);
    const DenseMatrix A = oracle::gaussian(5, 6, rng);
    std::stringstream ss;
    write_binary(ss, A);
    const std::string bytes = ss.str();
    std::stringstream in(bytes);
    EXPECT_EQ(read_binary(in).values(), A.values());
    std::stringstream cut(bytes.substr(0, bytes.size() - 3));
    EXPECT_ANY_THROW(read_binary(cut));
    std::stringstream wrong("STSV2" + bytes.substr(5));
    EXPECT_ANY_THROW(read_binary(wrong));
}

TEST(Files, LoadDetectsFormat) {
    Rng rng(3);
    const DenseMatrix A = oracle::gaussian(3, 2, rng);
    const std::string mm = temp_path("a.mtx"), bin = temp_path("a.bin");
    save_matrix(mm, A, MatrixFormat::MatrixMarket);
    save_matrix(bin, A, MatrixFormat::Binary);
    EXPECT_EQ(load_matrix(mm).values(), A.values());
    EXPECT_EQ(load_matrix(bin).values(), A.values());
    const Vector v = {1.0, -2.0, 0.125};
    save_vector(bin, v, MatrixFormat::Binary);
    EXPECT_EQ(load_vector(bin), v);
    std::remove(mm.c_str());
    std::remove(bin.c_str());
}

TEST(Format, ParsesNames) {
    EXPECT_EQ(parse_format("mm"), MatrixFormat::MatrixMarket);
    EXPECT_EQ(parse_format("bin"), MatrixFormat::Binary);
    EXPECT_THROW(parse_format("csv"), std::invalid_argument);
}
