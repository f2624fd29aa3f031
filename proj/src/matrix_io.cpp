#include "stsolve/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace stsolve {

namespace {

constexpr char kMagic[5] = {'S', 'T', 'S', 'V', '1'};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::uint64_t to_little(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
        return r;
    }
    return v;
}

void write_u64(std::ostream& out, std::uint64_t v) {
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("STSV1: truncated header");
    return to_little(v);
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

}  // namespace

MatrixFormat parse_format(const std::string& name) {
    const std::string n = lower(name);
    if (n == "mm" || n == "mtx") return MatrixFormat::MatrixMarket;
    if (n == "bin" || n == "stsv1") return MatrixFormat::Binary;
    throw std::invalid_argument("unknown format '" + name + "' (expected mm or bin)");
}

std::string format_extension(MatrixFormat f) {
    return f == MatrixFormat::MatrixMarket ? ".mtx" : ".bin";
}

DenseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("MatrixMarket: empty input");
    std::istringstream banner(line);
    std::string tag, object, layout, field, symmetry;
    banner >> tag >> object >> layout >> field >> symmetry;
    if (tag != "%%MatrixMarket" || lower(object) != "matrix")
        throw std::runtime_error("MatrixMarket: missing %%MatrixMarket matrix banner");
    layout = lower(layout);
    field = lower(field);
    symmetry = lower(symmetry);
    if (field == "complex") throw std::runtime_error("MatrixMarket: complex matrices are not supported");
    const bool symmetric = symmetry == "symmetric";
    const bool skew = symmetry == "skew-symmetric";
    if (!symmetric && !skew && symmetry != "general")
        throw std::runtime_error("MatrixMarket: unsupported symmetry '" + symmetry + "'");

    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream size_line(line);
    std::uint64_t rows = 0, cols = 0, nnz = 0;
    if (layout == "coordinate") {
        if (!(size_line >> rows >> cols >> nnz)) throw std::runtime_error("MatrixMarket: bad size line");
        DenseMatrix A(rows, cols);
        for (std::uint64_t e = 0; e < nnz; ++e) {
            std::uint64_t i = 0, j = 0;
            double v = 1.0;
            if (!(in >> i >> j)) throw std::runtime_error("MatrixMarket: truncated entries");
            if (field != "pattern" && !(in >> v)) throw std::runtime_error("MatrixMarket: truncated entries");
            if (i < 1 || j < 1 || i > rows || j > cols) throw std::runtime_error("MatrixMarket: index out of range");
            A(i - 1, j - 1) = v;
            if ((symmetric || skew) && i != j) A(j - 1, i - 1) = skew ? -v : v;
        }
        return A;
    }
    if (layout != "array") throw std::runtime_error("MatrixMarket: unknown layout '" + layout + "'");
    if (!(size_line >> rows >> cols)) throw std::runtime_error("MatrixMarket: bad size line");
    DenseMatrix A(rows, cols);
    // Array layout is column-major; symmetric files hold the lower triangle.
    for (std::uint64_t j = 0; j < cols; ++j) {
        const std::uint64_t start = (symmetric || skew) ? j + (skew ? 1 : 0) : 0;
        for (std::uint64_t i = start; i < rows; ++i) {
            double v = 0.0;
            if (!(in >> v)) throw std::runtime_error("MatrixMarket: truncated entries");
            A(i, j) = v;
            if ((symmetric || skew) && i != j) A(j, i) = skew ? -v : v;
        }
    }
    if (!A.all_finite()) throw std::runtime_error("MatrixMarket: non-finite entry");
    return A;
}

DenseMatrix read_matrix_market(const std::string& path) {
    auto in = open_in(path);
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const DenseMatrix& A, bool coordinate) {
    out << std::setprecision(17);
    if (coordinate) {
        std::uint64_t nnz = 0;
        for (double v : A.values()) nnz += (v != 0.0);
        out << "%%MatrixMarket matrix coordinate real general\n";
        out << A.rows() << ' ' << A.cols() << ' ' << nnz << '\n';
        for (Index i = 0; i < A.rows(); ++i)
            for (Index j = 0; j < A.cols(); ++j)
                if (A(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << A(i, j) << '\n';
        return;
    }
    out << "%%MatrixMarket matrix array real general\n";
    out << A.rows() << ' ' << A.cols() << '\n';
    for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i) out << A(i, j) << '\n';
}

void write_matrix_market(const std::string& path, const DenseMatrix& A, bool coordinate) {
    auto out = open_out(path);
    write_matrix_market(out, A, coordinate);
}

DenseMatrix read_binary(std::istream& in) {
    char magic[5];
    if (!in.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0)
        throw std::runtime_error("STSV1: bad magic");
    const std::uint64_t rows = read_u64(in);
    const std::uint64_t cols = read_u64(in);
    std::vector<double> data(rows * cols);
    for (double& v : data) {
        std::uint64_t bits = read_u64(in);
        std::memcpy(&v, &bits, sizeof v);
    }
    return DenseMatrix(rows, cols, std::move(data));
}

DenseMatrix read_binary(const std::string& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    return read_binary(in);
}

void write_binary(std::ostream& out, const DenseMatrix& A) {
    out.write(kMagic, 5);
    write_u64(out, A.rows());
    write_u64(out, A.cols());
    for (double v : A.values()) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof v);
        write_u64(out, bits);
    }
}

void write_binary(const std::string& path, const DenseMatrix& A) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    write_binary(out, A);
}

DenseMatrix load_matrix(const std::string& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    char head[5] = {};
    in.read(head, 5);
    in.clear();
    in.seekg(0);
    if (std::memcmp(head, kMagic, 5) == 0) return read_binary(in);
    return read_matrix_market(in);
}

void save_matrix(const std::string& path, const DenseMatrix& A, MatrixFormat format) {
    if (format == MatrixFormat::Binary)
        write_binary(path, A);
    else
        write_matrix_market(path, A);
}

Vector load_vector(const std::string& path) {
    const DenseMatrix M = load_matrix(path);
    if (M.cols() != 1 && M.rows() != 1) throw std::runtime_error("expected a vector in " + path);
    return M.values();
}

void save_vector(const std::string& path, const Vector& v, MatrixFormat format) {
    save_matrix(path, DenseMatrix(v.size(), 1, v), format);
}

}  // namespace stsolve
