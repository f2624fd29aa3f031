#include "stsolve/generators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "stsolve/flops.hpp"
#include "stsolve/linalg.hpp"
#include "stsolve/random.hpp"

namespace stsolve {

std::string to_string(Consistency c) { return c == Consistency::Consistent ? "consistent" : "inconsistent"; }

Consistency parse_consistency(const std::string& s) {
    if (s == "consistent") return Consistency::Consistent;
    if (s == "inconsistent") return Consistency::Inconsistent;
    throw std::invalid_argument("unknown consistency '" + s + "' (expected consistent or inconsistent)");
}

namespace {

DenseMatrix gaussian(Index rows, Index cols, Rng& rng) {
    DenseMatrix G(rows, cols);
    for (Index i = 0; i < G.size(); ++i) G.data()[i] = rng.normal();
    return G;
}

}  // namespace

Vector spiked_spectrum(const ProblemSpec& spec) {
    const Index r = std::min(spec.m, spec.n);
    if (r == 0) throw std::invalid_argument("gen_spiked: empty matrix requested");
    if (spec.k >= r) throw std::invalid_argument("gen_spiked: k must be below min(m, n)");
    if (!(spec.tail_spread >= 1.0)) throw std::invalid_argument("gen_spiked: tail_spread must be at least 1");
    if (!(spec.head_cond >= 1.0)) throw std::invalid_argument("gen_spiked: head_cond must be at least 1");
    if (!(spec.head_floor >= 1.0)) throw std::invalid_argument("gen_spiked: head_floor must be at least 1");
    const Index tail = r - spec.k;
    if (tail == 1 && spec.tail_spread > 1.0)
        throw std::invalid_argument("gen_spiked: a one-value tail can only have tail_spread 1");

    Rng rng = Rng(spec.seed, 0).split(7);
    Vector sigma(r, 1.0);
    if (tail > 1 && spec.tail_spread > 1.0) {
        Vector u(tail, 0.0);
        for (Index j = 0; j + 1 < tail; ++j) u[j] = 0.05 + rng.uniform();
        std::sort(u.begin(), u.end(), std::greater<>());
        double sum = 0.0;
        for (double v : u) sum += v;
        const double a = (spec.tail_spread * spec.tail_spread - 1.0) * double(tail) / sum;
        for (Index j = 0; j < tail; ++j) sigma[spec.k + j] = std::sqrt(1.0 + a * u[j]);
    }
    const double sigma_k = spec.head_floor * sigma[spec.k];
    for (Index i = 0; i < spec.k; ++i) {
        const double frac = spec.k == 1 ? 0.0 : double(spec.k - 1 - i) / double(spec.k - 1);
        sigma[i] = sigma_k * std::pow(spec.head_cond, frac);
    }
    return sigma;
}

Problem gen_spiked(const ProblemSpec& spec) {
    const Vector sigma = spiked_spectrum(spec);
    const Index m = spec.m, n = spec.n, r = sigma.size();
    if (spec.consistency == Consistency::Inconsistent && m <= r)
        throw std::invalid_argument("gen_spiked: an inconsistent system needs m > rank");

    Rng base(spec.seed, 0);
    Rng rng_u = base.split(1), rng_v = base.split(2), rng_x = base.split(3), rng_e = base.split(4);
    const Index extra = spec.consistency == Consistency::Inconsistent ? 1 : 0;
    const DenseMatrix U = orthonormal_factor(gaussian(m, r + extra, rng_u));
    const DenseMatrix V = orthonormal_factor(gaussian(n, r, rng_v));

    Problem p;
    p.singular_values = sigma;
    DenseMatrix US(m, r);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < r; ++j) US(i, j) = U(i, j) * sigma[j];
    p.A = matmat(US, transpose(V));

    // x* in the row space, so it is the minimum-norm solution.
    Vector coeff(r);
    for (double& c : coeff) c = rng_x.normal();
    p.x_star = matvec(V, coeff);
    p.b = matvec(p.A, p.x_star);
    if (extra) {
        const double level = (spec.noise > 0.0 ? spec.noise : 1.0) * norm2(p.b);
        double sign = rng_e.rademacher();
        for (Index i = 0; i < m; ++i) p.b[i] += sign * level * U(i, r);
    }
    return p;
}

DenseMatrix gen_psd(std::span<const double> eigenvalues, std::uint64_t seed) {
    const Index n = eigenvalues.size();
    for (double v : eigenvalues)
        if (!(v >= 0.0)) throw std::invalid_argument("gen_psd: eigenvalues must be nonnegative");
    Rng rng = Rng(seed, 0).split(6);
    const DenseMatrix Q = orthonormal_factor(gaussian(n, n, rng));
    DenseMatrix QL(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) QL(i, j) = Q(i, j) * eigenvalues[j];
    DenseMatrix A = matmat(QL, transpose(Q));
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (A(i, j) + A(j, i));
            A(i, j) = avg;
            A(j, i) = avg;
        }
    return A;
}

SolveReport baseline_cg(const DenseMatrix& A, std::span<const double> b, double eps, Index max_iter,
                        const std::optional<Vector>& reference) {
    const Index m = A.rows(), n = A.cols();
    if (b.size() != m) throw std::invalid_argument("baseline_cg: b must have length m");
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t f0 = flops::count(), mon0 = flops::monitor_count();

    SolveReport rep;
    rep.solver = "cg";
    rep.attempts = 1;
    Vector x(n, 0.0);
    Vector r(b.begin(), b.end());
    Vector s = matvec_transpose(A, r);
    Vector p = s;
    double gamma = dot(s, s);
    const double bnorm = norm2(b);
    const double s0 = std::sqrt(gamma);
    rep.residual_history.push_back(bnorm);
    if (reference) rep.error_history.push_back(norm2(*reference));
    rep.converged = bnorm == 0.0 || s0 == 0.0;

    for (Index it = 1; it <= max_iter && !rep.converged; ++it) {
        const Vector q = matvec(A, p);
        const double qq = dot(q, q);
        if (!(qq > 0.0)) {
            rep.diagnostic = "curvature breakdown";
            break;
        }
        const double alpha = gamma / qq;
        axpy(alpha, p, x);
        axpy(-alpha, q, r);
        s = matvec_transpose(A, r);
        const double gamma_new = dot(s, s);
        const double res = norm2(r);
        rep.iterations_run = it;
        rep.residual_history.push_back(res);
        if (reference) {
            flops::MonitorScope monitor;
            rep.error_history.push_back(norm2(subtract(x, *reference)));
        }
        if (res * res <= eps * bnorm * bnorm || std::sqrt(gamma_new) <= eps * s0) {
            rep.converged = true;
            break;
        }
        const double beta = gamma_new / gamma;
        gamma = gamma_new;
        for (Index j = 0; j < n; ++j) p[j] = s[j] + beta * p[j];
        flops::add(2 * n);
    }
    if (!rep.converged && rep.diagnostic.empty()) rep.diagnostic = "iteration budget exhausted";
    rep.solution = std::move(x);
    rep.flop_count = flops::count() - f0;
    rep.monitor_flops = flops::monitor_count() - mon0;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.fitted_rate = fitted_decay_rate(rep.error_history.empty() ? rep.residual_history : rep.error_history);
    return rep;
}

Vector baseline_direct(const DenseMatrix& A, std::span<const double> b) {
    if (b.size() != A.rows()) throw std::invalid_argument("baseline_direct: b must have length m");
    if (std::min(A.rows(), A.cols()) > 2048)
        throw std::invalid_argument("baseline_direct: min(m, n) exceeds the 2048 guard");
    if (frobenius_norm(A) == 0.0) return Vector(A.cols(), 0.0);
    const CompactSvd svd = compact_svd(A);
    Vector c = matvec_transpose(svd.U, b);
    for (Index i = 0; i < c.size(); ++i) c[i] /= svd.S[i];
    return matvec(svd.V, c);
}

}  // namespace stsolve
