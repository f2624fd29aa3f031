#include "stsolve/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stsolve/esp.hpp"
#include "stsolve/inner_solver.hpp"
#include "stsolve/linalg.hpp"
#include "stsolve/random.hpp"
#include "stsolve/rht.hpp"
#include "stsolve/sampling.hpp"

namespace stsolve {

namespace {

DenseMatrix random_matrix(Index rows, Index cols, Rng& rng) {
    DenseMatrix A(rows, cols);
    for (Index i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
    return A;
}

std::string describe(const char* what, double value) {
    std::ostringstream os;
    os << what << " = " << value;
    return os.str();
}

CheckResult minor_sums(Rng rng) {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Index m = 3 + rng.below(6);
        const DenseMatrix F = random_matrix(m, m, rng);
        const DenseMatrix L = matmat(F, transpose(F));
        const SymmetricEigen e = symmetric_eigen(L);
        const EspTable table = esp_all(e.values);
        for (Index l = 1; l <= m; ++l) {
            double sum = 0.0;
            std::vector<bool> pick(m, false);
            std::fill(pick.begin(), pick.begin() + l, true);
            do {
                std::vector<Index> S;
                for (Index i = 0; i < m; ++i)
                    if (pick[i]) S.push_back(i);
                sum += determinant(principal_submatrix(L, S));
            } while (std::prev_permutation(pick.begin(), pick.end()));
            worst = std::max(worst, std::abs(sum - table[l]) / std::max(std::abs(table[l]), 1e-300));
        }
    }
    return {"principal minor sums", worst <= 1e-8, describe("max relative error", worst)};
}

CheckResult projection_bound(Rng rng) {
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 20; ++trial) {
        const Index m = 4 + rng.below(5);
        const DenseMatrix A = random_matrix(m, m, rng);
        const SpectralProfile prof = spectral_profile(A);
        for (Index kp = 1; kp < prof.rank; ++kp) {
            const double lmin = lambda_min_plus(expected_projection_exact(A, kp));
            for (Index k = 0; k < kp; ++k) worst = std::min(worst, lmin - projection_lower_bound(prof, k, kp));
        }
    }
    return {"expected projection lower bound", worst >= -1e-10, describe("min slack", worst)};
}

CheckResult projection_monotone(Rng rng) {
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 50; ++trial) {
        const Index m = 3 + rng.below(6);
        const DenseMatrix A = random_matrix(m, m, rng);
        std::vector<Index> big, small;
        for (Index i = 0; i < m; ++i)
            if (rng.uniform() < 0.6) big.push_back(i);
        for (Index i : big)
            if (rng.uniform() < 0.5) small.push_back(i);
        const DenseMatrix P2 = projection_matrix(A, big), P1 = projection_matrix(A, small);
        DenseMatrix D(m, m);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) D(i, j) = 0.5 * (P2(i, j) - P1(i, j) + P2(j, i) - P1(j, i));
        worst = std::min(worst, symmetric_eigen(D).values.back());
    }
    return {"projector monotonicity", worst >= -1e-10, describe("min eigenvalue", worst)};
}

CheckResult esp_ratio(Rng rng) {
    bool ok = true;
    for (int trial = 0; trial < 50 && ok; ++trial) {
        const Index m = 3 + rng.below(8);
        Vector lambda(m);
        for (double& v : lambda) v = std::exp(3.0 * rng.normal());
        std::sort(lambda.begin(), lambda.end(), std::greater<>());
        for (Index tau = 1; tau + 1 <= m && ok; ++tau)
            for (Index j = 1; j <= tau && ok; ++j) ok = esp_ratio_bound_check(lambda, tau, j);
    }
    return {"esp ratio bound", ok, ok ? "all pairs hold" : "violation found"};
}

CheckResult kdpp_agreement(Rng rng) {
    double worst = 0.0;
    const std::vector<Vector> diagonals = {{4.0, 2.0, 1.0, 1.0}, {3.0, 1.0, 0.5, 0.5, 0.25}};
    for (const Vector& d : diagonals) {
        const DppKernel K = DppKernel::from_matrix(DenseMatrix::diagonal(d));
        const Index k = 2;
        const Pmf exact = kdpp_pmf_bruteforce(K, k);
        const KdppSampler sampler(K, k);
        std::vector<SampleSet> draws;
        for (int i = 0; i < 20000; ++i) draws.push_back(sampler.draw(rng));
        worst = std::max(worst, total_variation(empirical_pmf(draws), exact));
    }
    return {"k-DPP sampler agreement", worst <= 0.03, describe("max TV at 2e4 draws", worst)};
}

CheckResult coupon_tail(Rng rng) {
    const double delta = 0.01;
    const Index m = 1000, t = 50, trials = 2000;
    Index ok = 0;
    for (Index i = 0; i < trials; ++i)
        if (double(coupon_calls_to_collect(m, t, {}, rng)) <= 4.0 * t + 4.0 * std::log(1.0 / delta)) ++ok;
    const double freq = double(ok) / double(trials);
    return {"coupon collector tail", freq >= 1.0 - delta, describe("success frequency", freq)};
}

CheckResult whitening_band(Rng rng) {
    PreconditionerOptions opt;
    opt.embedding.eps = 0.5;
    Index inside = 0;
    const Index trials = 20;
    for (Index i = 0; i < trials; ++i) {
        const DenseMatrix Atil = random_matrix(20, 500, rng);
        const Preconditioner P = build_preconditioner(Atil, opt, rng);
        if (condition_number(matmat_tn(Atil, P.M)) <= 2.25) ++inside;
    }
    return {"preconditioner whitening band", inside + 1 >= trials, describe("trials inside band", double(inside))};
}

CheckResult transform_orthogonality(Rng rng) {
    double worst = 0.0;
    for (Index n : {1, 3, 8, 33, 100}) {
        const RhtOperator op = make_rht(n, rng);
        const DenseMatrix Q = materialize(op);
        const DenseMatrix G = matmat_tn(Q, Q);
        worst = std::max(worst, max_abs_diff(G, DenseMatrix::identity(G.rows())));
    }
    return {"transform orthogonality", worst <= 1e-12, describe("max |QᵀQ - I|", worst)};
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
    const Rng base(seed, 0);
    return {minor_sums(base.split(1)),       projection_bound(base.split(2)), projection_monotone(base.split(3)),
            esp_ratio(base.split(4)),        kdpp_agreement(base.split(5)),   coupon_tail(base.split(6)),
            whitening_band(base.split(7)), transform_orthogonality(base.split(8))};
}

}  // namespace stsolve
