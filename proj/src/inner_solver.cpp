#include "stsolve/inner_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stsolve/flops.hpp"
#include "stsolve/linalg.hpp"

namespace stsolve {

namespace {

void check_options(const EmbeddingOptions& opt) {
    if (!(opt.eps > 0.0 && opt.eps < 1.0)) throw std::invalid_argument("embedding: eps must lie in (0, 1)");
    if (!(opt.delta > 0.0 && opt.delta < 1.0)) throw std::invalid_argument("embedding: delta must lie in (0, 1)");
}

}  // namespace

Index embedding_rows(Index d, const EmbeddingOptions& opt) {
    check_options(opt);
    return static_cast<Index>(std::ceil(opt.c_phi * (double(d) + std::log(1.0 / opt.delta)) / (opt.eps * opt.eps)));
}

Index embedding_nonzeros(Index d, const EmbeddingOptions& opt) {
    check_options(opt);
    const double s = std::ceil(opt.c_s * std::log(std::max(double(d), 1.0) / opt.delta) / opt.eps);
    return std::max<Index>(1, static_cast<Index>(s));
}

SparseEmbedding build_embedding(Index n, Index d, const EmbeddingOptions& opt, Rng& rng) {
    SparseEmbedding e;
    e.n = n;
    e.phi = std::max<Index>(1, embedding_rows(d, opt));
    e.s = std::min(embedding_nonzeros(d, opt), e.phi);
    e.rows.resize(n * e.s);
    e.values.resize(n * e.s);
    const double v = 1.0 / std::sqrt(double(e.s));
    for (Index j = 0; j < n; ++j) {
        std::uint32_t* r = e.rows.data() + j * e.s;
        for (Index c = 0; c < e.s;) {
            const auto cand = static_cast<std::uint32_t>(rng.below(e.phi));
            if (std::find(r, r + c, cand) != r + c) continue;
            r[c] = cand;
            e.values[j * e.s + c] = v * rng.rademacher();
            ++c;
        }
    }
    return e;
}

DenseMatrix apply_embedding(const SparseEmbedding& phi, const DenseMatrix& X) {
    if (X.rows() != phi.n) throw std::invalid_argument("apply_embedding: dimension mismatch");
    const Index c = X.cols();
    DenseMatrix out(phi.phi, c);
    Index nnz_rows = 0;
    for (Index j = 0; j < phi.n; ++j) {
        const double* x = X.data() + j * c;
        bool zero = true;
        for (Index q = 0; q < c && zero; ++q) zero = x[q] == 0.0;
        if (zero) continue;
        ++nnz_rows;
        for (Index t = 0; t < phi.s; ++t) {
            const double v = phi.values[j * phi.s + t];
            double* o = out.data() + phi.rows[j * phi.s + t] * c;
            for (Index q = 0; q < c; ++q) o[q] += v * x[q];
        }
    }
    flops::add(static_cast<std::uint64_t>(nnz_rows) * phi.s * c);
    return out;
}

Vector apply_embedding(const SparseEmbedding& phi, std::span<const double> x) {
    return apply_embedding(phi, DenseMatrix(x.size(), 1, Vector(x.begin(), x.end()))).values();
}

DenseMatrix apply_embedding_to_transpose(const SparseEmbedding& phi, const DenseMatrix& Atil) {
    if (Atil.cols() != phi.n) throw std::invalid_argument("apply_embedding_to_transpose: dimension mismatch");
    const Index tau = Atil.rows();
    DenseMatrix out(phi.phi, tau);
    for (Index c = 0; c < tau; ++c) {
        const double* a = Atil.data() + c * phi.n;
        for (Index j = 0; j < phi.n; ++j) {
            const double aj = a[j];
            if (aj == 0.0) continue;
            for (Index t = 0; t < phi.s; ++t)
                out(phi.rows[j * phi.s + t], c) += phi.values[j * phi.s + t] * aj;
        }
    }
    flops::add(static_cast<std::uint64_t>(tau) * phi.n * phi.s);
    return out;
}

namespace {

Preconditioner from_sketch(const DenseMatrix& sketch, double rank_tol, bool exact) {
    CompactSvd svd;
    try {
        svd = compact_svd(sketch, rank_tol);
    } catch (const std::domain_error&) {
        throw std::domain_error("sampled block is zero");
    }
    Preconditioner p;
    p.M = DenseMatrix(svd.V.rows(), svd.rank());
    for (Index i = 0; i < svd.V.rows(); ++i)
        for (Index c = 0; c < svd.rank(); ++c) p.M(i, c) = svd.V(i, c) / svd.S[c];
    p.sketch_singular_values = std::move(svd.S);
    p.exact_sketch = exact;
    return p;
}

}  // namespace

Preconditioner build_exact_preconditioner(const DenseMatrix& Atil, double rank_tol) {
    return from_sketch(transpose(Atil), rank_tol, true);
}

Preconditioner build_preconditioner(const DenseMatrix& Atil, const SparseEmbedding& phi, double rank_tol) {
    return from_sketch(apply_embedding_to_transpose(phi, Atil), rank_tol, false);
}

Preconditioner build_preconditioner(const DenseMatrix& Atil, const PreconditionerOptions& opt, Rng& rng) {
    const Index tau = Atil.rows(), n = Atil.cols();
    if (tau > n) throw std::invalid_argument("build_preconditioner: need tau <= n");
    if (embedding_rows(tau, opt.embedding) >= n) return build_exact_preconditioner(Atil, opt.rank_tol);
    const SparseEmbedding phi = build_embedding(n, tau, opt.embedding, rng);
    return build_preconditioner(Atil, phi, opt.rank_tol);
}

LinearOperator dense_operator(const DenseMatrix& B) {
    LinearOperator op;
    op.rows = B.rows();
    op.cols = B.cols();
    op.apply = [&B](std::span<const double> v) { return matvec(B, v); };
    op.apply_transpose = [&B](std::span<const double> v) { return matvec_transpose(B, v); };
    return op;
}

CgResult cg_normal_second_kind(const LinearOperator& B, std::span<const double> rhs, Index s_max) {
    if (rhs.size() != B.rows) throw std::invalid_argument("cg_normal_second_kind: rhs length mismatch");
    const Index t = B.rows;
    CgResult res;
    res.u.assign(t, 0.0);
    Vector r(rhs.begin(), rhs.end());
    Vector p = r;
    double rr = 0.0;
    for (double v : r) rr += v * v;
    const double stop = 1e-32 * rr;
    for (Index s = 0; s < s_max && rr > stop && rr > 0.0; ++s) {
        const Vector q = B.apply(B.apply_transpose(p));
        double curvature = 0.0;
        for (Index i = 0; i < t; ++i) curvature += p[i] * q[i];
        if (!(curvature > 1e-300) || !std::isfinite(curvature)) {
            res.breakdown = true;
            break;
        }
        const double alpha = rr / curvature;
        double rr_new = 0.0;
        for (Index i = 0; i < t; ++i) {
            res.u[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            rr_new += r[i] * r[i];
        }
        const double beta = rr_new / rr;
        for (Index i = 0; i < t; ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
        res.iterations = s + 1;
        flops::add(4 * static_cast<std::uint64_t>(t));
    }
    return res;
}

ProjectStep approx_project_step(const DenseMatrix& Atil, std::span<const double> btil, const Preconditioner& M,
                                Index s_max) {
    if (btil.size() != Atil.rows() || M.M.rows() != Atil.rows())
        throw std::invalid_argument("approx_project_step: dimension mismatch");
    // B = Mᵀ Atil, applied as two thin products.
    LinearOperator B;
    B.rows = M.rank();
    B.cols = Atil.cols();
    B.apply = [&](std::span<const double> v) { return matvec_transpose(M.M, matvec(Atil, v)); };
    B.apply_transpose = [&](std::span<const double> u) { return matvec_transpose(Atil, matvec(M.M, u)); };
    const Vector rhs = matvec_transpose(M.M, btil);
    CgResult cg = cg_normal_second_kind(B, rhs, s_max);
    ProjectStep step;
    step.w = B.apply_transpose(cg.u);
    step.u = std::move(cg.u);
    step.cg_iterations = cg.iterations;
    step.breakdown = cg.breakdown;
    return step;
}

}  // namespace stsolve
