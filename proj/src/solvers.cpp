#include "stsolve/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "stsolve/flops.hpp"
#include "stsolve/inner_solver.hpp"
#include "stsolve/linalg.hpp"
#include "stsolve/random.hpp"
#include "stsolve/rht.hpp"
#include "stsolve/sampling.hpp"

namespace stsolve {

namespace {

using Clock = std::chrono::steady_clock;

struct Plan {
    Index tau = 0;
    Index s_max = 0;
    Index t_max = 0;
    Index check_every = 1;
    PreconditionerOptions precond;
};

Plan make_plan(const SolverConfig& cfg, Index universe, Index r) {
    if (!(cfg.eps > 0.0 && cfg.eps <= 1.0)) throw std::invalid_argument("solver: eps must lie in (0, 1]");
    if (r == 0) throw std::invalid_argument("solver: empty system");
    Plan p;
    if (cfg.tau > 0) {
        if (cfg.tau > r) throw std::invalid_argument("solver: tau must not exceed min(m, n)");
        p.tau = cfg.tau;
    } else {
        p.tau = std::min(derive_tau(cfg.k, universe, cfg.C), r);
    }
    const double rho = std::min(1.0, double(p.tau) / double(r));
    p.s_max = cfg.s_max > 0 ? cfg.s_max : derive_s_max(rho, cfg.eps_embed);
    p.t_max = cfg.t_max > 0 ? cfg.t_max
                            : static_cast<Index>(std::ceil(50.0 * double(r) / double(p.tau) *
                                                           std::max(1.0, std::log(1.0 / cfg.eps))));
    p.check_every = cfg.check_every > 0 ? cfg.check_every : (r + p.tau - 1) / p.tau;
    p.precond.embedding.eps = cfg.eps_embed;
    p.precond.embedding.delta = cfg.delta_embed > 0.0 ? cfg.delta_embed : rho / 324.0;
    p.precond.embedding.c_phi = cfg.c_phi;
    p.precond.embedding.c_s = cfg.c_s;
    p.precond.rank_tol = cfg.rank_tol;
    return p;
}

// A block as large as the unpadded dimension takes every transformed index.
SampleSet draw_block(const RhtOperator& op, Index tau, Rng& rng) {
    const Index universe = op.dim;
    if (tau >= op.original_dim) {
        std::vector<Index> all(universe);
        std::iota(all.begin(), all.end(), Index{0});
        return SampleSet{std::move(all), universe};
    }
    return uniform_coupon_sample(universe, tau, rng);
}

// Taller-than-wide blocks (only the full-sample case) are whitened exactly.
Preconditioner precondition(const DenseMatrix& Atil, const Plan& plan, Rng& rng) {
    if (Atil.rows() > Atil.cols()) return build_exact_preconditioner(Atil, plan.precond.rank_tol);
    return build_preconditioner(Atil, plan.precond, rng);
}

double residual_norm(const DenseMatrix& A, std::span<const double> x, std::span<const double> b) {
    Vector r = matvec(A, x);
    for (Index i = 0; i < r.size(); ++i) r[i] -= b[i];
    return norm2(r);
}

class Meter {
public:
    Meter() : start_(Clock::now()), flops_(flops::count()), monitor_(flops::monitor_count()) {}
    void finish(SolveReport& rep) const {
        rep.flop_count = flops::count() - flops_;
        rep.monitor_flops = flops::monitor_count() - monitor_;
        rep.wall_time = std::chrono::duration<double>(Clock::now() - start_).count();
        rep.fitted_rate = fitted_decay_rate(rep.error_history.empty() ? rep.residual_history : rep.error_history);
    }

private:
    Clock::time_point start_;
    std::uint64_t flops_;
    std::uint64_t monitor_;
};

struct CdRun {
    Vector x;
    Vector history;
    Vector errors;
    Index iterations = 0;
    bool converged = false;
};

// Block Kaczmarz on prepared data: AbarT = Q Aᵀ (p x m) for the transform op.
// With b given, c must equal Aᵀ b and the residual ||A x - b|| is tracked.
CdRun run_coordinate_descent(const RhtOperator& op, const DenseMatrix& AbarT, std::span<const double> c,
                             const Vector* b, const SolverConfig& cfg, const Plan& plan, Rng& sample_rng,
                             Rng& embed_rng, const Vector* reference_Ax, bool gradient_stop) {
    const Index p = op.dim, m = AbarT.cols();
    const Vector cbar = apply_forward(op, c);
    const double cnorm = norm2(c);
    const double bnorm = b ? norm2(*b) : 0.0;

    CdRun run;
    Vector z(p, 0.0), y(m, 0.0);
    run.history.push_back(b ? bnorm : cnorm);
    if (reference_Ax) run.errors.push_back(norm2(*reference_Ax));
    if (cnorm == 0.0 || (b && bnorm == 0.0)) {
        run.converged = true;
        run.x.assign(op.original_dim, 0.0);
        return run;
    }

    auto gradient_norm = [&]() {
        Vector g = matvec(AbarT, y);
        for (Index i = 0; i < p; ++i) g[i] -= cbar[i];
        return norm2(g);
    };

    for (Index t = 1; t <= plan.t_max; ++t) {
        const SampleSet S = draw_block(op, plan.tau, sample_rng);
        const DenseMatrix AtilT = gather_rows(AbarT, S.indices);
        Vector ctil = matvec(AtilT, y);
        for (Index i = 0; i < S.size(); ++i) ctil[i] -= cbar[S.indices[i]];
        try {
            const Preconditioner M = precondition(AtilT, plan, embed_rng);
            const ProjectStep step = approx_project_step(AtilT, ctil, M, plan.s_max);
            const Vector wx = matvec(M.M, step.u);
            for (Index i = 0; i < S.size(); ++i) z[S.indices[i]] -= wx[i];
            axpy(-1.0, step.w, y);
        } catch (const std::domain_error&) {
            // The sampled columns are all zero; nothing to project.
        }
        run.iterations = t;

        const bool check = t % plan.check_every == 0 || t == plan.t_max;
        bool done = false;
        if (b) {
            const double res = norm2(subtract(y, *b));
            run.history.push_back(res);
            done = res * res <= cfg.eps * bnorm * bnorm;
            if (!done && check && gradient_stop) done = gradient_norm() <= cfg.eps * cnorm;
        } else if (check) {
            const double g = gradient_norm();
            run.history.push_back(g);
            done = g <= cfg.eps * cnorm;
        } else {
            flops::MonitorScope monitor;
            run.history.push_back(gradient_norm());
        }
        if (reference_Ax) {
            flops::MonitorScope monitor;
            run.errors.push_back(norm2(subtract(y, *reference_Ax)));
        }
        if (cfg.observer) {
            flops::MonitorScope monitor;
            const Vector x = pull_back_solution(op, z);
            cfg.observer(IterationView{t, x, y});
        }
        if (done) {
            run.converged = true;
            break;
        }
    }
    run.x = pull_back_solution(op, z);
    return run;
}

SolveReport coordinate_descent_driver(const DenseMatrix& A, std::span<const double> c, const Vector* b,
                                      const SolverConfig& cfg, const char* name, bool gradient_stop = true) {
    const Index m = A.rows(), n = A.cols();
    if (c.size() != n) throw std::invalid_argument("solve_coordinate_descent: c must have length n");
    const Meter meter;
    const Plan plan = make_plan(cfg, n, std::min(m, n));
    SolveReport rep;
    rep.solver = name;
    rep.tau = plan.tau;
    rep.s_max = plan.s_max;

    Vector reference_Ax;
    if (cfg.reference) {
        flops::MonitorScope monitor;
        reference_Ax = matvec(A, *cfg.reference);
    }
    const DenseMatrix At = transpose(A);
    for (Index attempt = 0; attempt <= cfg.rht_retries; ++attempt) {
        const Rng base(cfg.seed, attempt);
        Rng rht_rng = base.split(1), sample_rng = base.split(2), embed_rng = base.split(3);
        const RhtOperator op = make_rht(n, rht_rng);
        const DenseMatrix AbarT = apply_left(op, At);
        CdRun run = run_coordinate_descent(op, AbarT, c, b, cfg, plan, sample_rng, embed_rng,
                                           cfg.reference ? &reference_Ax : nullptr, gradient_stop);
        rep.attempts = attempt + 1;
        rep.solution = std::move(run.x);
        rep.residual_history = std::move(run.history);
        rep.error_history = std::move(run.errors);
        rep.iterations_run = run.iterations;
        rep.converged = run.converged;
        if (rep.converged) break;
    }
    if (!rep.converged) rep.diagnostic = "iteration budget exhausted";
    meter.finish(rep);
    return rep;
}

}  // namespace

Index derive_tau(Index k, Index dim, double C) {
    if (dim == 0) throw std::invalid_argument("derive_tau: empty dimension");
    const double ln = std::log(double(std::max<Index>(dim, 2)));
    const double raw = std::ceil(C * double(k) * ln * ln * ln);
    const Index lo = std::min(k + 1, dim);
    const Index hi = std::max(lo, dim / 4);
    const Index tau = static_cast<Index>(std::clamp(raw, double(lo), double(hi)));
    return std::max<Index>(1, std::min(tau, dim));
}

Index derive_s_max(double rho, double eps_embed) {
    const double kappa = (1.0 + eps_embed) * (1.0 + eps_embed);
    const double q = (kappa - 1.0) / (kappa + 1.0);
    const double s = std::ceil(std::log(16.0 / std::max(rho, 1e-12)) / std::log(1.0 / q));
    return std::max<Index>(1, static_cast<Index>(s));
}

double fitted_decay_rate(std::span<const double> history) {
    if (history.empty() || !(history[0] > 0.0)) return 1.0;
    const double floor = 1e-13 * history[0];
    std::vector<double> ts, ls;
    bool hit_floor = false;
    for (Index t = 0; t < history.size(); ++t) {
        if (!(history[t] > floor)) {
            hit_floor = true;
            break;
        }
        ts.push_back(double(t));
        ls.push_back(2.0 * std::log(history[t]));
    }
    if (ts.size() < 2) return hit_floor ? std::numeric_limits<double>::min() : 1.0;
    const double tm = std::accumulate(ts.begin(), ts.end(), 0.0) / double(ts.size());
    const double lm = std::accumulate(ls.begin(), ls.end(), 0.0) / double(ls.size());
    double num = 0.0, den = 0.0;
    for (Index i = 0; i < ts.size(); ++i) {
        num += (ts[i] - tm) * (ls[i] - lm);
        den += (ts[i] - tm) * (ts[i] - tm);
    }
    const double rate = std::exp(num / den);
    return std::clamp(rate, std::numeric_limits<double>::min(), 1.0);
}

SolveReport solve_kaczmarz(const DenseMatrix& A, std::span<const double> b, const SolverConfig& cfg) {
    const Index m = A.rows(), n = A.cols();
    if (b.size() != m) throw std::invalid_argument("solve_kaczmarz: b must have length m");
    const Meter meter;
    const Plan plan = make_plan(cfg, m, std::min(m, n));
    SolveReport rep;
    rep.solver = "kaczmarz";
    rep.tau = plan.tau;
    rep.s_max = plan.s_max;
    const double bnorm = norm2(b);

    for (Index attempt = 0; attempt <= cfg.rht_retries; ++attempt) {
        const Rng base(cfg.seed, attempt);
        Rng rht_rng = base.split(1), sample_rng = base.split(2), embed_rng = base.split(3);
        const RhtOperator op = make_rht(m, rht_rng);
        const DenseMatrix Abar = apply_left(op, A);
        const Vector bbar = apply_forward(op, b);
        const Index p = op.dim;

        Vector x(n, 0.0);
        rep.attempts = attempt + 1;
        rep.residual_history.assign(1, bnorm);
        rep.error_history.clear();
        if (cfg.reference) rep.error_history.push_back(norm2(*cfg.reference));
        rep.iterations_run = 0;
        rep.converged = bnorm == 0.0;
        rep.diagnostic.clear();
        double best = std::numeric_limits<double>::infinity();
        Index stalled = 0;

        for (Index t = 1; t <= plan.t_max && !rep.converged; ++t) {
            const SampleSet S = draw_block(op, plan.tau, sample_rng);
            const DenseMatrix Atil = gather_rows(Abar, S.indices);
            Vector btil = matvec(Atil, x);
            for (Index i = 0; i < S.size(); ++i) btil[i] -= bbar[S.indices[i]];
            try {
                const Preconditioner M = precondition(Atil, plan, embed_rng);
                const ProjectStep step = approx_project_step(Atil, btil, M, plan.s_max);
                axpy(-1.0, step.w, x);
            } catch (const std::domain_error&) {
                // Zero block: the step is empty.
            }
            rep.iterations_run = t;

            const bool check = t % plan.check_every == 0 || t == plan.t_max;
            double res;
            if (check) {
                res = residual_norm(A, x, b);
            } else {
                flops::MonitorScope monitor;
                res = residual_norm(A, x, b);
            }
            rep.residual_history.push_back(res);
            if (cfg.reference) {
                flops::MonitorScope monitor;
                rep.error_history.push_back(norm2(subtract(x, *cfg.reference)));
            }
            if (cfg.observer) cfg.observer(IterationView{t, x, {}});
            if (!check) continue;
            if (res <= cfg.eps * bnorm) {
                rep.converged = true;
            } else if (res < best * (1.0 - 1e-3)) {
                best = res;
                stalled = 0;
            } else if (++stalled >= 20) {
                rep.diagnostic = "residual plateau above eps: system appears inconsistent";
                break;
            }
        }
        rep.solution = std::move(x);
        if (rep.converged || !rep.diagnostic.empty()) break;
    }
    if (!rep.converged && rep.diagnostic.empty()) rep.diagnostic = "iteration budget exhausted";
    meter.finish(rep);
    return rep;
}

SolveReport solve_coordinate_descent(const DenseMatrix& A, std::span<const double> c, const SolverConfig& cfg) {
    return coordinate_descent_driver(A, c, nullptr, cfg, "coordinate_descent");
}

SolveReport solve_normal_equations(const DenseMatrix& A, std::span<const double> b, const SolverConfig& cfg) {
    if (b.size() != A.rows()) throw std::invalid_argument("solve_normal_equations: b must have length m");
    const Vector bv(b.begin(), b.end());
    const Vector c = matvec_transpose(A, b);
    return coordinate_descent_driver(A, c, &bv, cfg, "coordinate_descent");
}

SolveReport solve_psd(const DenseMatrix& A, std::span<const double> b, const SolverConfig& cfg) {
    const Index n = A.rows();
    if (A.cols() != n) throw std::invalid_argument("solve_psd: matrix must be square");
    if (b.size() != n) throw std::invalid_argument("solve_psd: b must have length n");
    const Meter meter;
    {
        flops::MonitorScope monitor;
        double scale = 0.0, asym = 0.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) {
                scale = std::max(scale, std::abs(A(i, j)));
                asym = std::max(asym, std::abs(A(i, j) - A(j, i)));
            }
        if (asym > 1e-8 * scale) throw std::invalid_argument("solve_psd: matrix is not symmetric");
        const SymmetricEigen e = symmetric_eigen(A);
        if (n > 0 && e.values.back() < -1e-8 * std::max(e.values.front(), 0.0))
            throw std::invalid_argument("solve_psd: matrix is not positive semidefinite");
    }
    const Plan plan = make_plan(cfg, n, n);
    SolveReport rep;
    rep.solver = "psd";
    rep.tau = plan.tau;
    rep.attempts = 1;
    const Index superset = cfg.walk_superset > 0 ? std::min(cfg.walk_superset, n) : std::min(2 * plan.tau, n);
    const Index burn_in =
        cfg.burn_in > 0 ? cfg.burn_in : 10 * static_cast<Index>(std::ceil(std::log(double(std::max<Index>(n, 2)))));

    const double bnorm = norm2(b);
    Vector x(n, 0.0);
    Vector r(b.begin(), b.end());
    for (double& v : r) v = -v;
    rep.residual_history.push_back(bnorm);
    auto a_norm_error = [&]() {
        const Vector d = subtract(x, *cfg.reference);
        return std::sqrt(std::max(0.0, dot(d, matvec(A, d))));
    };
    if (cfg.reference) {
        flops::MonitorScope monitor;
        rep.error_history.push_back(a_norm_error());
    }
    rep.converged = bnorm == 0.0;

    const DppKernel K = DppKernel::from_matrix(A, false);
    Rng walk_rng = Rng(cfg.seed, 0).split(4);
    SampleSet S;
    try {
        S = greedy_initial_set(K, plan.tau);
    } catch (const std::domain_error&) {
        throw std::invalid_argument("solve_psd: tau exceeds the numerical rank of A");
    }

    for (Index t = 1; t <= plan.t_max && !rep.converged; ++t) {
        S = downup_walk(K, plan.tau, superset, burn_in, walk_rng, &S);
        Vector rS(S.size());
        for (Index i = 0; i < S.size(); ++i) rS[i] = r[S.indices[i]];
        const Vector w = symmetric_pinv_solve(principal_submatrix(A, S.indices), rS, cfg.rank_tol);
        for (Index i = 0; i < S.size(); ++i) {
            x[S.indices[i]] -= w[i];
            axpy(-w[i], A.row(S.indices[i]), r);
        }
        rep.iterations_run = t;
        if (t % plan.check_every == 0) r = subtract(matvec(A, x), b);
        double res = norm2(r);
        if (res <= cfg.eps * bnorm) {
            r = subtract(matvec(A, x), b);
            res = norm2(r);
            rep.converged = res <= cfg.eps * bnorm;
        }
        rep.residual_history.push_back(res);
        if (cfg.reference) {
            flops::MonitorScope monitor;
            rep.error_history.push_back(a_norm_error());
        }
        if (cfg.observer) cfg.observer(IterationView{t, x, {}});
    }
    rep.solution = std::move(x);
    if (!rep.converged) rep.diagnostic = "iteration budget exhausted";
    meter.finish(rep);
    return rep;
}

SolveReport solve_least_squares(const DenseMatrix& A, std::span<const double> b, const SolverConfig& cfg) {
    const Index rows = A.rows(), d = A.cols();
    if (d > rows) throw std::invalid_argument("use coordinate-descent solver directly");
    if (b.size() != rows) throw std::invalid_argument("solve_least_squares: b must have length n");
    if (!(cfg.eps > 0.0 && cfg.eps <= 1.0)) throw std::invalid_argument("solver: eps must lie in (0, 1]");
    const Meter meter;
    SolveReport rep;
    rep.solver = "least_squares";
    rep.attempts = 1;

    const Rng base(cfg.seed, 0);
    Rng sketch_rng = base.split(5), rht_rng = base.split(1), sample_rng = base.split(2), embed_rng = base.split(3);

    // One-time sketch with distortion 1/8; when it would not compress, use A itself.
    EmbeddingOptions hess;
    hess.eps = 0.125;
    hess.delta = cfg.delta_embed > 0.0 ? cfg.delta_embed : 0.01;
    hess.c_phi = cfg.c_phi;
    hess.c_s = cfg.c_s;
    DenseMatrix Atil;
    if (embedding_rows(d, hess) >= rows) {
        Atil = A;
    } else {
        const SparseEmbedding phi = build_embedding(rows, d, hess, sketch_rng);
        Atil = apply_embedding(phi, A);
    }

    SolverConfig inner = cfg;
    inner.reference.reset();
    inner.observer = nullptr;
    inner.eps = cfg.inner_eps;
    inner.t_max = cfg.inner_t_max;
    const Plan plan = make_plan(inner, d, std::min(Atil.rows(), d));
    rep.tau = plan.tau;
    rep.s_max = plan.s_max;

    const RhtOperator op = make_rht(d, rht_rng);
    const DenseMatrix AbarT = apply_left(op, transpose(Atil));

    const Index outer = cfg.t_max > 0 ? cfg.t_max
                                      : static_cast<Index>(std::ceil(std::log(1.0 / cfg.eps) / std::log(1.2))) + 1;
    Vector x(d, 0.0);
    Vector r(b.begin(), b.end());
    for (double& v : r) v = -v;
    rep.residual_history.push_back(norm2(r));
    Vector reference_Ax;
    if (cfg.reference) {
        flops::MonitorScope monitor;
        reference_Ax = matvec(A, *cfg.reference);
        rep.error_history.push_back(norm2(reference_Ax));
    }
    // Gradients below this level are indistinguishable from rounding error.
    const double g_floor = 64.0 * std::numeric_limits<double>::epsilon() * frobenius_norm(A) * norm2(b);
    double g0 = -1.0;
    for (Index t = 1; t <= outer; ++t) {
        const Vector g = matvec_transpose(A, r);
        const double gnorm = norm2(g);
        if (g0 < 0.0) g0 = gnorm;
        if (gnorm <= cfg.eps * g0 || gnorm <= g_floor) {
            rep.converged = true;
            break;
        }
        const CdRun step =
            run_coordinate_descent(op, AbarT, g, nullptr, inner, plan, sample_rng, embed_rng, nullptr, true);
        axpy(-1.0, step.x, x);
        r = subtract(matvec(A, x), b);
        rep.iterations_run = t;
        rep.residual_history.push_back(norm2(r));
        if (cfg.reference) {
            flops::MonitorScope monitor;
            Vector diff(r);
            for (Index i = 0; i < rows; ++i) diff[i] += b[i] - reference_Ax[i];
            rep.error_history.push_back(norm2(diff));
        }
        if (cfg.observer) cfg.observer(IterationView{t, x, {}});
    }
    if (!rep.converged) {
        const double gnorm = norm2(matvec_transpose(A, r));
        rep.converged = gnorm <= cfg.eps * std::max(g0, 0.0) || gnorm <= g_floor;
    }
    rep.solution = std::move(x);
    if (!rep.converged) rep.diagnostic = "iteration budget exhausted";
    meter.finish(rep);
    return rep;
}

SolveReport solve_auto(const DenseMatrix& A, std::span<const double> b, double eps, const SolverConfig& base_cfg) {
    const Index m = A.rows(), n = A.cols();
    if (b.size() != m) throw std::invalid_argument("solve_auto: b must have length m");
    const Meter meter;
    const double bnorm = norm2(b);
    const Vector bv(b.begin(), b.end());
    const Vector c = matvec_transpose(A, b);
    SolveReport rep;
    Index rounds = 0;
    for (Index k = 1; k <= std::min(m, n); k *= 2) {
        ++rounds;
        SolverConfig cfg = base_cfg;
        cfg.k = k;
        cfg.tau = 0;
        cfg.eps = std::min(eps, 1.0);
        cfg.seed = base_cfg.seed + 0x9E3779B9ull * (rounds - 1);
        rep = coordinate_descent_driver(A, c, &bv, cfg, "auto", false);
        const double res = residual_norm(A, rep.solution, b);
        rep.converged = res * res <= eps * bnorm * bnorm;
        rep.diagnostic = "rounds=" + std::to_string(rounds) + " k=" + std::to_string(k);
        if (rep.converged) break;
    }
    if (!rep.converged) rep.diagnostic += "; guessed head size exceeded min(m, n)";
    rep.solver = "auto";
    meter.finish(rep);
    return rep;
}

}  // namespace stsolve
