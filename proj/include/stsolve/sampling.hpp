#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "stsolve/dense_matrix.hpp"
#include "stsolve/random.hpp"

namespace stsolve {

// Strictly increasing 0-based indices drawn from [0, universe).
struct SampleSet {
    std::vector<Index> indices;
    Index universe = 0;

    Index size() const noexcept { return indices.size(); }
    bool contains(Index i) const;
    friend bool operator==(const SampleSet& a, const SampleSet& b) = default;
    friend bool operator<(const SampleSet& a, const SampleSet& b) {
        return a.universe != b.universe ? a.universe < b.universe : a.indices < b.indices;
    }
};

SampleSet make_sample_set(std::vector<Index> indices, Index universe);

// Symmetric PSD kernel L, held explicitly or as L = F Fᵀ.
class DppKernel {
public:
    static DppKernel from_matrix(DenseMatrix L, bool validate = true);
    static DppKernel from_factor(DenseMatrix F);

    Index size() const noexcept;
    double entry(Index i, Index j) const;
    DenseMatrix restrict_to(std::span<const Index> idx) const;
    DenseMatrix dense() const;

private:
    DppKernel() = default;
    std::optional<DenseMatrix> L_;
    std::optional<DenseMatrix> F_;
};

using Pmf = std::map<SampleSet, double>;

// Distinct values among tau uniform draws from [m].
SampleSet uniform_coupon_sample(Index m, Index tau, Rng& rng);

// Uniform draws needed to collect t indices outside `exclude`.
Index coupon_calls_to_collect(Index m, Index t, std::span<const Index> exclude, Rng& rng);

Pmf kdpp_pmf_bruteforce(const DppKernel& K, Index k);
std::vector<double> kdpp_marginals_exact(const DppKernel& K, Index k);

SampleSet exact_kdpp_sample(const DppKernel& K, Index k, Rng& rng);

// Eigendecomposes the kernel once so that repeated k-DPP draws are cheap.
class KdppSampler {
public:
    KdppSampler(const DppKernel& K, Index k);
    SampleSet draw(Rng& rng) const;

private:
    Index m_ = 0;
    Index k_ = 0;
    DenseMatrix vectors_;  // eigenvectors with positive eigenvalue, as columns
    Vector inclusion_;     // Bernoulli inclusion probabilities, empty when all are taken
};

// Greedy volume maximisation (pivoted Cholesky) to a k-subset with positive minor.
SampleSet greedy_initial_set(const DppKernel& K, Index k);

// Down-up walk: lift to a uniform t-superset, then draw the conditional k-DPP
// on the superset. Starts from `start` or from the greedy set.
SampleSet downup_walk(const DppKernel& K, Index k, Index t, Index n_steps, Rng& rng,
                      const SampleSet* start = nullptr);

double total_variation(const Pmf& p, const Pmf& q);
Pmf empirical_pmf(const std::vector<SampleSet>& draws);

}  // namespace stsolve
