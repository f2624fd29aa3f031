#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracle.hpp"
#include "stsolve/linalg.hpp"
#include "stsolve/sampling.hpp"

using namespace stsolve;

namespace {

// Independent k-DPP pmf: determinants from Eigen over all k-subsets.
std::map<std::vector<Index>, double> reference_pmf(const DenseMatrix& L, Index k) {
    const Eigen::MatrixXd E = oracle::to_eigen(L);
    const Index m = L.rows();
    std::map<std::vector<Index>, double> out;
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        if (static_cast<Index>(__builtin_popcount(mask)) != k) continue;
        std::vector<Index> S;
        for (Index i = 0; i < m; ++i)
            if (mask & (1u << i)) S.push_back(i);
        Eigen::MatrixXd sub(k, k);
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b) sub(a, b) = E(S[a], S[b]);
        const double d = std::max(0.0, sub.determinant());
        out[S] = d;
        total += d;
    }
    for (auto& [s, p] : out) p /= total;
    return out;
}

Pmf as_pmf(const std::map<std::vector<Index>, double>& ref, Index m) {
    Pmf p;
    for (const auto& [s, v] : ref) p[SampleSet{s, m}] = v;
    return p;
}

}  // namespace

TEST(SampleSet, ValidatesIndices) {
    const SampleSet s = make_sample_set({3, 1, 2}, 5);
    EXPECT_EQ(s.indices, (std::vector<Index>{1, 2, 3}));
    EXPECT_TRUE(s.contains(2));
    EXPECT_FALSE(s.contains(0));
    EXPECT_THROW(make_sample_set({1, 1}, 5), std::invalid_argument);
    EXPECT_THROW(make_sample_set({5}, 5), std::invalid_argument);
}

TEST(CouponSample, SingleElementUniverse) {
    Rng rng(1);
    const SampleSet s = uniform_coupon_sample(1, 5, rng);
    EXPECT_EQ(s.indices, (std::vector<Index>{0}));
}

TEST(CouponSample, SingleDrawIsUniform) {
    Rng rng(2);
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 50000; ++i) {
        const SampleSet s = uniform_coupon_sample(5, 1, rng);
        ASSERT_EQ(s.size(), 1u);
        ++counts[s.indices[0]];
    }
    for (int c : counts) EXPECT_NEAR(c / 50000.0, 0.2, 0.01);
}

TEST(CouponSample, MeanDistinctCountMatchesClosedForm) {
    Rng rng(3);
    const Index m = 100, tau = 50;
    double total = 0.0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const SampleSet s = uniform_coupon_sample(m, tau, rng);
        ASSERT_LE(s.size(), tau);
        for (Index j = 1; j < s.size(); ++j) ASSERT_LT(s.indices[j - 1], s.indices[j]);
        total += double(s.size());
    }
    const double expected = m * (1.0 - std::pow(1.0 - 1.0 / m, double(tau)));
    EXPECT_NEAR(expected, 39.50, 0.01);
    EXPECT_NEAR(total / trials, expected, 0.01 * expected);
}

TEST(CouponCollector, TailBound) {
    Rng rng(4);
    const double delta = 0.01;
    const Index m = 500, t = 50;
    int ok = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i)
        if (double(coupon_calls_to_collect(m, t, {}, rng)) <= 4.0 * t + 4.0 * std::log(1.0 / delta)) ++ok;
    EXPECT_GE(ok, static_cast<int>((1.0 - delta) * trials));
}

TEST(CouponCollector, RespectsExclusions) {
    Rng rng(5);
    const std::vector<Index> exclude = {0, 1, 2};
    EXPECT_EQ(coupon_calls_to_collect(4, 1, exclude, rng) >= 1u, true);
    EXPECT_THROW(coupon_calls_to_collect(4, 2, exclude, rng), std::invalid_argument);
}

TEST(KdppPmf, Examples) {
    const Pmf a = kdpp_pmf_bruteforce(DppKernel::from_matrix(DenseMatrix::identity(2)), 1);
    EXPECT_NEAR(a.at(SampleSet{{0}, 2}), 0.5, 1e-15);
    const DppKernel d = DppKernel::from_matrix(DenseMatrix::diagonal(Vector{2, 1}));
    const Pmf b = kdpp_pmf_bruteforce(d, 1);
    EXPECT_NEAR(b.at(SampleSet{{0}, 2}), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(b.at(SampleSet{{1}, 2}), 1.0 / 3.0, 1e-15);
    const Pmf c = kdpp_pmf_bruteforce(d, 2);
    EXPECT_NEAR(c.at(SampleSet{{0, 1}, 2}), 1.0, 1e-15);
}

TEST(KdppPmf, MatchesIndependentDeterminants) {
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const Index m = 3 + rng.below(5);
        const DenseMatrix F = oracle::gaussian(m, m, rng);
        const DenseMatrix L = matmat(F, transpose(F));
        for (Index k = 1; k <= m; ++k) {
            const Pmf p = kdpp_pmf_bruteforce(DppKernel::from_matrix(L, false), k);
            const auto ref = reference_pmf(L, k);
            double sum = 0.0;
            for (const auto& [s, v] : ref) {
                EXPECT_NEAR(p.at(SampleSet{s, m}), v, 1e-10);
                sum += p.at(SampleSet{s, m});
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
    }
}

TEST(KdppPmf, RankDeficientKernelThrows) {
    const DenseMatrix L = DenseMatrix::diagonal(Vector{1, 0, 0});
    try {
        kdpp_pmf_bruteforce(DppKernel::from_matrix(L), 2);
        FAIL();
    } catch (const std::domain_error& e) {
        EXPECT_STREQ(e.what(), "k exceeds rank support");
    }
}

TEST(DppKernel, ValidatesSymmetryAndSign) {
    EXPECT_THROW(DppKernel::from_matrix(DenseMatrix::from_rows({{1, 0.5}, {0, 1}})), std::invalid_argument);
    EXPECT_THROW(DppKernel::from_matrix(DenseMatrix::diagonal(Vector{1, -1})), std::invalid_argument);
    Rng rng(7);
    const DenseMatrix F = oracle::gaussian(4, 2, rng);
    const DppKernel K = DppKernel::from_factor(F);
    EXPECT_LE(max_abs_diff(K.dense(), matmat(F, transpose(F))), 1e-14);
}

TEST(Marginals, Examples) {
    const auto id = kdpp_marginals_exact(DppKernel::from_matrix(DenseMatrix::identity(5)), 2);
    for (double v : id) EXPECT_NEAR(v, 0.4, 1e-14);
    const auto d = kdpp_marginals_exact(DppKernel::from_matrix(DenseMatrix::diagonal(Vector{2, 1})), 1);
    EXPECT_NEAR(d[0], 2.0 / 3.0, 1e-14);
    Rng rng(8);
    const DenseMatrix F = oracle::gaussian(7, 7, rng);
    const auto r = kdpp_marginals_exact(DppKernel::from_matrix(matmat(F, transpose(F)), false), 3);
    double sum = 0.0;
    for (double v : r) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0 + 1e-12);
        sum += v;
    }
    EXPECT_NEAR(sum, 3.0, 1e-10);
}

TEST(ExactSampler, IdentityKernelIsUniform) {
    Rng rng(9);
    const Index m = 6;
    std::vector<int> counts(m, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[exact_kdpp_sample(DppKernel::from_matrix(DenseMatrix::identity(m)), 1, rng).indices[0]];
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - n / double(m)) * (c - n / double(m)) / (n / double(m));
    EXPECT_LT(chi2, 15.09);  // 0.99 quantile with 5 degrees of freedom
}

TEST(ExactSampler, DiagonalKernelFrequency) {
    Rng rng(10);
    const KdppSampler s(DppKernel::from_matrix(DenseMatrix::diagonal(Vector{2, 1})), 1);
    int zero = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) zero += s.draw(rng).indices[0] == 0;
    EXPECT_NEAR(zero / double(n), 2.0 / 3.0, 0.01);
}

TEST(ExactSampler, RankOneFollowsSquaredEntries) {
    Rng rng(11);
    const Vector u = {0.6, 0.0, 0.8};
    DenseMatrix L(3, 3);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) L(i, j) = 5.0 * u[i] * u[j];
    const KdppSampler s(DppKernel::from_matrix(L), 1);
    std::vector<int> counts(3, 0);
    const int n = 50000;
    for (int i = 0; i < n; ++i) ++counts[s.draw(rng).indices[0]];
    EXPECT_EQ(counts[1], 0);
    EXPECT_NEAR(counts[0] / double(n), 0.36, 0.01);
    EXPECT_NEAR(counts[2] / double(n), 0.64, 0.01);
}

TEST(ExactSampler, MatchesBruteForceInTotalVariation) {
    Rng rng(12);
    for (int trial = 0; trial < 3; ++trial) {
        const Index m = 5 + trial;
        const DenseMatrix F = oracle::gaussian(m, m, rng);
        const DenseMatrix L = matmat(F, transpose(F));
        const Index k = 2;
        const KdppSampler s(DppKernel::from_matrix(L, false), k);
        std::vector<SampleSet> draws;
        for (int i = 0; i < 100000; ++i) draws.push_back(s.draw(rng));
        EXPECT_LE(total_variation(empirical_pmf(draws), as_pmf(reference_pmf(L, k), m)), 0.02);
    }
}

TEST(ExactSampler, RankBelowKThrows) {
    Rng rng(13);
    EXPECT_THROW(exact_kdpp_sample(DppKernel::from_matrix(DenseMatrix::diagonal(Vector{1, 0, 0})), 2, rng),
                 std::domain_error);
}

TEST(GreedyInitialSet, PicksPositiveVolume) {
    const DppKernel K = DppKernel::from_matrix(DenseMatrix::diagonal(Vector{1, 5, 0, 3}));
    const SampleSet s = greedy_initial_set(K, 2);
    EXPECT_EQ(s.indices, (std::vector<Index>{1, 3}));
    try {
        greedy_initial_set(K, 4);
        FAIL();
    } catch (const std::domain_error& e) {
        EXPECT_STREQ(e.what(), "kernel rank below k");
    }
}

TEST(DownUpWalk, SupersetEqualToSetIsIdentity) {
    Rng rng(14);
    const DppKernel K = DppKernel::from_matrix(DenseMatrix::identity(6));
    const SampleSet start{{1, 4}, 6};
    EXPECT_EQ(downup_walk(K, 2, 2, 100, rng, &start), start);
}

TEST(DownUpWalk, IdentityKernelBecomesUniform) {
    Rng rng(15);
    const DppKernel K = DppKernel::from_matrix(DenseMatrix::identity(4));
    std::vector<SampleSet> draws;
    for (int i = 0; i < 20000; ++i) draws.push_back(downup_walk(K, 1, 2, 50, rng));
    EXPECT_LE(total_variation(empirical_pmf(draws), kdpp_pmf_bruteforce(K, 1)), 0.02);
}

TEST(DownUpWalk, DiagonalKernelMatchesBruteForce) {
    Rng rng(16);
    const DppKernel K = DppKernel::from_matrix(DenseMatrix::diagonal(Vector{4, 2, 1, 1}));
    std::vector<SampleSet> draws;
    for (int i = 0; i < 20000; ++i) draws.push_back(downup_walk(K, 2, 3, 100, rng));
    EXPECT_LE(total_variation(empirical_pmf(draws), kdpp_pmf_bruteforce(K, 2)), 0.02);
}

TEST(Samplers, DeterministicGivenSeed) {
    const DppKernel K = DppKernel::from_matrix(DenseMatrix::diagonal(Vector{4, 2, 1, 1, 3}));
    Rng a(17), b(17);
    for (int i = 0; i < 20; ++i) {
        EXPECT_EQ(uniform_coupon_sample(50, 10, a), uniform_coupon_sample(50, 10, b));
        EXPECT_EQ(exact_kdpp_sample(K, 2, a), exact_kdpp_sample(K, 2, b));
        EXPECT_EQ(downup_walk(K, 2, 4, 5, a), downup_walk(K, 2, 4, 5, b));
    }
}

TEST(TotalVariation, Basics) {
    Pmf p, q;
    p[SampleSet{{0}, 2}] = 1.0;
    q[SampleSet{{1}, 2}] = 1.0;
    EXPECT_DOUBLE_EQ(total_variation(p, q), 1.0);
    EXPECT_DOUBLE_EQ(total_variation(p, p), 0.0);
}
