#include "stsolve/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "stsolve/flops.hpp"

namespace stsolve {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("dimension mismatch: ") + what);
}

std::uint64_t u64(Index v) { return static_cast<std::uint64_t>(v); }

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "dot");
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i) s += x[i] * y[i];
    flops::add(u64(x.size()));
    return s;
}

double norm2(std::span<const double> x) {
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double v : x) {
        const double r = v / scale;
        s += r * r;
    }
    flops::add(u64(x.size()));
    return scale * std::sqrt(s);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require(x.size() == y.size(), "axpy");
    for (Index i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
    flops::add(u64(x.size()));
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "subtract");
    Vector out(x.size());
    for (Index i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

Vector matvec(const DenseMatrix& A, std::span<const double> x) {
    require(x.size() == A.cols(), "matvec");
    Vector y(A.rows(), 0.0);
    for (Index i = 0; i < A.rows(); ++i) {
        const double* a = A.data() + i * A.cols();
        double s = 0.0;
        for (Index j = 0; j < A.cols(); ++j) s += a[j] * x[j];
        y[i] = s;
    }
    flops::add(u64(A.rows()) * u64(A.cols()));
    return y;
}

Vector matvec_transpose(const DenseMatrix& A, std::span<const double> x) {
    require(x.size() == A.rows(), "matvec_transpose");
    Vector y(A.cols(), 0.0);
    for (Index i = 0; i < A.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* a = A.data() + i * A.cols();
        for (Index j = 0; j < A.cols(); ++j) y[j] += xi * a[j];
    }
    flops::add(u64(A.rows()) * u64(A.cols()));
    return y;
}

DenseMatrix matmat(const DenseMatrix& A, const DenseMatrix& B) {
    require(A.cols() == B.rows(), "matmat");
    const Index m = A.rows(), k = A.cols(), n = B.cols();
    DenseMatrix C(m, n);
    for (Index i = 0; i < m; ++i) {
        double* c = C.data() + i * n;
        for (Index l = 0; l < k; ++l) {
            const double a = A(i, l);
            if (a == 0.0) continue;
            const double* b = B.data() + l * n;
            for (Index j = 0; j < n; ++j) c[j] += a * b[j];
        }
    }
    flops::add(u64(m) * u64(k) * u64(n));
    return C;
}

DenseMatrix matmat_tn(const DenseMatrix& A, const DenseMatrix& B) {
    require(A.rows() == B.rows(), "matmat_tn");
    const Index m = A.cols(), k = A.rows(), n = B.cols();
    DenseMatrix C(m, n);
    for (Index l = 0; l < k; ++l) {
        const double* b = B.data() + l * n;
        for (Index i = 0; i < m; ++i) {
            const double a = A(l, i);
            if (a == 0.0) continue;
            double* c = C.data() + i * n;
            for (Index j = 0; j < n; ++j) c[j] += a * b[j];
        }
    }
    flops::add(u64(m) * u64(k) * u64(n));
    return C;
}

DenseMatrix transpose(const DenseMatrix& A) {
    DenseMatrix T(A.cols(), A.rows());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
    return T;
}

DenseMatrix gather_rows(const DenseMatrix& A, std::span<const Index> rows) {
    DenseMatrix out(rows.size(), A.cols());
    for (Index r = 0; r < rows.size(); ++r) {
        require(rows[r] < A.rows(), "gather_rows index");
        std::copy_n(A.data() + rows[r] * A.cols(), A.cols(), out.data() + r * A.cols());
    }
    return out;
}

DenseMatrix gather_cols(const DenseMatrix& A, std::span<const Index> cols) {
    for (Index c : cols) require(c < A.cols(), "gather_cols index");
    DenseMatrix out(A.rows(), cols.size());
    for (Index i = 0; i < A.rows(); ++i) {
        const double* a = A.data() + i * A.cols();
        double* o = out.data() + i * cols.size();
        for (Index c = 0; c < cols.size(); ++c) o[c] = a[cols[c]];
    }
    return out;
}

DenseMatrix principal_submatrix(const DenseMatrix& A, std::span<const Index> idx) {
    require(A.rows() == A.cols(), "principal_submatrix on non-square matrix");
    DenseMatrix out(idx.size(), idx.size());
    for (Index a = 0; a < idx.size(); ++a)
        for (Index b = 0; b < idx.size(); ++b) out(a, b) = A(idx[a], idx[b]);
    return out;
}

double frobenius_norm(const DenseMatrix& A) { return norm2(A.values()); }

double max_abs_diff(const DenseMatrix& A, const DenseMatrix& B) {
    require(A.rows() == B.rows() && A.cols() == B.cols(), "max_abs_diff");
    double d = 0.0;
    for (Index i = 0; i < A.size(); ++i) d = std::max(d, std::abs(A.data()[i] - B.data()[i]));
    return d;
}

namespace {

// One-sided Jacobi on a tall matrix (m >= n) held column-major in w.
CompactSvd jacobi_svd_tall(std::vector<double> w, Index m, Index n, double rank_tol) {
    std::vector<double> v(n * n, 0.0);
    for (Index j = 0; j < n; ++j) v[j * n + j] = 1.0;

    const double tol = std::max(1e-15, std::numeric_limits<double>::epsilon() * std::sqrt(double(m)));
    std::vector<double> sq(n);
    auto col = [&](Index j) { return w.data() + j * m; };

    for (int sweep = 0; sweep < 80; ++sweep) {
        for (Index j = 0; j < n; ++j) {
            const double* c = col(j);
            double s = 0.0;
            for (Index i = 0; i < m; ++i) s += c[i] * c[i];
            sq[j] = s;
        }
        bool rotated = false;
        for (Index p = 0; p + 1 < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const double alpha = sq[p], beta = sq[q];
                if (alpha == 0.0 || beta == 0.0) continue;
                double* wp = col(p);
                double* wq = col(q);
                double gamma = 0.0;
                for (Index i = 0; i < m; ++i) gamma += wp[i] * wq[i];
                if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Index i = 0; i < m; ++i) {
                    const double a = wp[i], b = wq[i];
                    wp[i] = c * a - s * b;
                    wq[i] = s * a + c * b;
                }
                double* vp = v.data() + p * n;
                double* vq = v.data() + q * n;
                for (Index i = 0; i < n; ++i) {
                    const double a = vp[i], b = vq[i];
                    vp[i] = c * a - s * b;
                    vq[i] = s * a + c * b;
                }
                sq[p] = alpha - t * gamma;
                sq[q] = beta + t * gamma;
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (Index j = 0; j < n; ++j) {
        const double* c = col(j);
        double s = 0.0;
        for (Index i = 0; i < m; ++i) s += c[i] * c[i];
        sigma[j] = std::sqrt(s);
    }
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return sigma[a] > sigma[b]; });

    const double smax = n ? sigma[order[0]] : 0.0;
    if (!(smax > 0.0)) throw std::domain_error("zero matrix has no compact SVD");
    Index r = 0;
    while (r < n && sigma[order[r]] > rank_tol * smax) ++r;

    CompactSvd out{DenseMatrix(m, r), Vector(r), DenseMatrix(n, r)};
    for (Index k = 0; k < r; ++k) {
        const Index j = order[k];
        out.S[k] = sigma[j];
        const double* c = col(j);
        for (Index i = 0; i < m; ++i) out.U(i, k) = c[i] / sigma[j];
        for (Index i = 0; i < n; ++i) out.V(i, k) = v[j * n + i];
    }
    return out;
}

}  // namespace

CompactSvd compact_svd(const DenseMatrix& A, double rank_tol) {
    const Index m = A.rows(), n = A.cols();
    if (m == 0 || n == 0) throw std::domain_error("zero matrix has no compact SVD");
    if (m >= n) {
        std::vector<double> w(m * n);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < n; ++j) w[j * m + i] = A(i, j);
        flops::add(2 * u64(m) * u64(n) * u64(n) + 11 * u64(n) * u64(n) * u64(n));
        return jacobi_svd_tall(std::move(w), m, n, rank_tol);
    }
    // Work on Aᵀ, whose columns are the rows of A.
    std::vector<double> w(A.values());
    flops::add(2 * u64(n) * u64(m) * u64(m) + 11 * u64(m) * u64(m) * u64(m));
    CompactSvd t = jacobi_svd_tall(std::move(w), n, m, rank_tol);
    return CompactSvd{std::move(t.V), std::move(t.S), std::move(t.U)};
}

namespace {

// Householder reduction to tridiagonal form followed by implicit QL with
// Wilkinson shifts. z holds the matrix on entry and the eigenvectors on exit
// (column-major view: z[i][k] is component i of vector k).
void tridiagonal_ql(std::vector<double>& z, Index n, Vector& d, Vector& e) {
    auto Z = [&](Index i, Index j) -> double& { return z[i * n + j]; };
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (Index j = 0; j < n; ++j) d[j] = Z(n - 1, j);

    for (Index i = n - 1; i > 0; --i) {
        double scale = 0.0, h = 0.0;
        for (Index k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (Index j = 0; j < i; ++j) {
                d[j] = Z(i - 1, j);
                Z(i, j) = 0.0;
                Z(j, i) = 0.0;
            }
        } else {
            for (Index k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (Index j = 0; j < i; ++j) e[j] = 0.0;
            for (Index j = 0; j < i; ++j) {
                f = d[j];
                Z(j, i) = f;
                g = e[j] + Z(j, j) * f;
                for (Index k = j + 1; k <= i - 1; ++k) {
                    g += Z(k, j) * d[k];
                    e[k] += Z(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (Index j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (Index j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (Index j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (Index k = j; k <= i - 1; ++k) Z(k, j) -= (f * e[k] + g * d[k]);
                d[j] = Z(i - 1, j);
                Z(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (Index i = 0; i + 1 < n; ++i) {
        Z(n - 1, i) = Z(i, i);
        Z(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (Index k = 0; k <= i; ++k) d[k] = Z(k, i + 1) / h;
            for (Index j = 0; j <= i; ++j) {
                double g = 0.0;
                for (Index k = 0; k <= i; ++k) g += Z(k, i + 1) * Z(k, j);
                for (Index k = 0; k <= i; ++k) Z(k, j) -= g * d[k];
            }
        }
        for (Index k = 0; k <= i; ++k) Z(k, i + 1) = 0.0;
    }
    for (Index j = 0; j < n; ++j) {
        d[j] = Z(n - 1, j);
        Z(n - 1, j) = 0.0;
    }
    Z(n - 1, n - 1) = 1.0;
    e[0] = 0.0;

    for (Index i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    double f = 0.0, tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (Index l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        Index m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m == n) m = n - 1;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 60) throw std::runtime_error("symmetric_eigen: QL iteration did not converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (Index i = l + 2; i < n; ++i) d[i] -= h;
                f += h;
                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (Index i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (Index k = 0; k < n; ++k) {
                        h = Z(k, i + 1);
                        Z(k, i + 1) = s * Z(k, i) + c * h;
                        Z(k, i) = c * Z(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

}  // namespace

SymmetricEigen symmetric_eigen(const DenseMatrix& M) {
    require(M.rows() == M.cols(), "symmetric_eigen on non-square matrix");
    const Index n = M.rows();
    SymmetricEigen out{Vector(n), DenseMatrix(n, n)};
    if (n == 0) return out;
    std::vector<double> z(n * n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) z[i * n + j] = i <= j ? M(i, j) : M(j, i);
    Vector d, e;
    tridiagonal_ql(z, n, d, e);
    flops::add(9 * u64(n) * u64(n) * u64(n));

    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return d[x] > d[y]; });
    for (Index k = 0; k < n; ++k) {
        out.values[k] = d[order[k]];
        for (Index i = 0; i < n; ++i) out.vectors(i, k) = z[i * n + order[k]];
    }
    return out;
}

Vector symmetric_pinv_solve(const DenseMatrix& M, std::span<const double> r, double rank_tol) {
    require(M.rows() == r.size(), "symmetric_pinv_solve");
    const SymmetricEigen e = symmetric_eigen(M);
    const Index n = M.rows();
    Vector x(n, 0.0);
    if (n == 0 || !(e.values[0] > 0.0)) return x;
    const double cutoff = rank_tol * e.values[0];
    for (Index k = 0; k < n && e.values[k] > cutoff; ++k) {
        double c = 0.0;
        for (Index i = 0; i < n; ++i) c += e.vectors(i, k) * r[i];
        c /= e.values[k];
        for (Index i = 0; i < n; ++i) x[i] += c * e.vectors(i, k);
    }
    flops::add(2 * u64(n) * u64(n));
    return x;
}

DenseMatrix orthonormal_factor(const DenseMatrix& A) {
    const Index m = A.rows(), n = A.cols();
    require(m >= n, "orthonormal_factor needs rows >= cols");
    DenseMatrix R = A;
    std::vector<Vector> reflectors(n);
    std::vector<double> betas(n, 0.0);
    Vector w(n);

    for (Index k = 0; k < n; ++k) {
        Vector vk(m - k);
        double normx = 0.0;
        for (Index i = k; i < m; ++i) {
            vk[i - k] = R(i, k);
            normx += vk[i - k] * vk[i - k];
        }
        normx = std::sqrt(normx);
        if (normx == 0.0) {
            reflectors[k] = std::move(vk);
            continue;
        }
        const double alpha = -std::copysign(normx, vk[0]);
        const double x0 = vk[0];
        vk[0] -= alpha;
        const double vnorm2 = normx * normx - x0 * x0 + vk[0] * vk[0];
        const double beta = 2.0 / vnorm2;
        std::fill(w.begin() + k, w.end(), 0.0);
        for (Index i = k; i < m; ++i) {
            const double vi = vk[i - k];
            const double* r = R.data() + i * n;
            for (Index j = k; j < n; ++j) w[j] += vi * r[j];
        }
        for (Index i = k; i < m; ++i) {
            const double f = beta * vk[i - k];
            double* r = R.data() + i * n;
            for (Index j = k; j < n; ++j) r[j] -= f * w[j];
        }
        betas[k] = beta;
        reflectors[k] = std::move(vk);
    }

    DenseMatrix Q(m, n);
    for (Index j = 0; j < n; ++j) Q(j, j) = 1.0;
    for (Index kk = n; kk-- > 0;) {
        const double beta = betas[kk];
        if (beta == 0.0) continue;
        const Vector& vk = reflectors[kk];
        std::fill(w.begin() + kk, w.end(), 0.0);
        for (Index i = kk; i < m; ++i) {
            const double vi = vk[i - kk];
            const double* q = Q.data() + i * n;
            for (Index j = kk; j < n; ++j) w[j] += vi * q[j];
        }
        for (Index i = kk; i < m; ++i) {
            const double f = beta * vk[i - kk];
            double* q = Q.data() + i * n;
            for (Index j = kk; j < n; ++j) q[j] -= f * w[j];
        }
    }
    flops::add(4 * u64(m) * u64(n) * u64(n));
    return Q;
}

double determinant(const DenseMatrix& A) {
    require(A.rows() == A.cols(), "determinant of non-square matrix");
    const Index n = A.rows();
    DenseMatrix lu = A;
    double det = 1.0;
    for (Index k = 0; k < n; ++k) {
        Index piv = k;
        for (Index i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
        if (lu(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (Index j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            det = -det;
        }
        det *= lu(k, k);
        for (Index i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            for (Index j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    flops::add(u64(n) * u64(n) * u64(n) / 3);
    return det;
}

SpectralProfile profile_from_values(Vector singular_values, Index m, Index n) {
    for (Index i = 0; i < singular_values.size(); ++i) {
        if (!(singular_values[i] > 0.0)) throw std::invalid_argument("spectral profile: singular values must be positive");
        if (i > 0 && singular_values[i] > singular_values[i - 1])
            throw std::invalid_argument("spectral profile: singular values must be nonincreasing");
    }
    if (singular_values.size() > std::min(m, n)) throw std::invalid_argument("spectral profile: rank exceeds min(m, n)");
    SpectralProfile p;
    p.rank = singular_values.size();
    p.singular_values = std::move(singular_values);
    p.m = m;
    p.n = n;
    return p;
}

SpectralProfile spectral_profile(const DenseMatrix& A, double rank_tol) {
    CompactSvd svd = compact_svd(A, rank_tol);
    return profile_from_values(std::move(svd.S), A.rows(), A.cols());
}

double tail_condition(const SpectralProfile& profile, Index k) {
    const Index r = profile.rank;
    if (k >= r) throw std::invalid_argument("tail_condition: k must be below the rank");
    const double smin = profile.singular_values[r - 1];
    double s = 0.0;
    for (Index j = k; j < r; ++j) {
        const double ratio = profile.singular_values[j] / smin;
        s += ratio * ratio;
    }
    return std::sqrt(s / double(r - k));
}

double lambda_min_plus(const DenseMatrix& M, double tol) {
    require(M.rows() == M.cols(), "lambda_min_plus on non-square matrix");
    const Index n = M.rows();
    double scale = 0.0, asym = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            scale = std::max(scale, std::abs(M(i, j)));
            asym = std::max(asym, std::abs(M(i, j) - M(j, i)));
        }
    if (scale == 0.0) return 0.0;
    if (asym > tol * scale) throw std::invalid_argument("lambda_min_plus: matrix is not symmetric");
    const SymmetricEigen e = symmetric_eigen(M);
    const double lmax = e.values.front();
    if (!(lmax > 0.0)) return 0.0;
    double best = lmax;
    for (double v : e.values)
        if (v > tol * lmax) best = std::min(best, v);
    return best;
}

double condition_number(const DenseMatrix& A, double rank_tol) {
    const CompactSvd svd = compact_svd(A, rank_tol);
    return svd.S.front() / svd.S.back();
}

}  // namespace stsolve
