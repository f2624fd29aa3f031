#include "stsolve/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stsolve/flops.hpp"
#include "stsolve/linalg.hpp"

namespace stsolve {

namespace {

constexpr long kRejectionCap = 1'000'000;

// Visits every k-subset of [m] in lexicographic order.
template <class F>
void for_each_subset(Index m, Index k, F&& visit) {
    if (k > m) return;
    std::vector<Index> idx(k);
    std::iota(idx.begin(), idx.end(), Index{0});
    while (true) {
        visit(idx);
        Index i = k;
        while (i > 0 && idx[i - 1] == m - k + (i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (Index j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Sequential sampler for the projection DPP spanned by orthonormal columns.
std::vector<Index> sample_projection_dpp(std::vector<Vector> cols, Rng& rng) {
    const Index m = cols.empty() ? 0 : cols.front().size();
    std::vector<Index> chosen;
    Vector weight(m);
    while (!cols.empty()) {
        double total = 0.0;
        for (Index j = 0; j < m; ++j) {
            double w = 0.0;
            for (const Vector& c : cols) w += c[j] * c[j];
            weight[j] = w;
            total += w;
        }
        double u = rng.uniform() * total;
        Index pick = m - 1;
        for (Index j = 0; j < m; ++j) {
            if (u < weight[j]) {
                pick = j;
                break;
            }
            u -= weight[j];
        }
        while (weight[pick] <= 0.0 && pick > 0) --pick;
        chosen.push_back(pick);

        Index pivot = 0;
        for (Index c = 1; c < cols.size(); ++c)
            if (std::abs(cols[c][pick]) > std::abs(cols[pivot][pick])) pivot = c;
        const Vector v = cols[pivot];
        cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(pivot));
        for (Vector& c : cols) {
            const double f = c[pick] / v[pick];
            for (Index j = 0; j < m; ++j) c[j] -= f * v[j];
        }
        for (Index a = 0; a < cols.size(); ++a) {
            for (Index b = 0; b < a; ++b) {
                const double proj = std::inner_product(cols[a].begin(), cols[a].end(), cols[b].begin(), 0.0);
                for (Index j = 0; j < m; ++j) cols[a][j] -= proj * cols[b][j];
            }
            const double nrm = std::sqrt(std::inner_product(cols[a].begin(), cols[a].end(), cols[a].begin(), 0.0));
            if (nrm > 0.0)
                for (double& x : cols[a]) x /= nrm;
        }
        flops::add(static_cast<std::uint64_t>(m) * (cols.size() + 1) * (cols.size() + 2));
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

// Scale alpha with sum_i alpha*l_i / (alpha*l_i + 1) = k, which makes the
// Bernoulli sum most likely to hit k. The k-DPP of alpha*L equals that of L.
double balancing_scale(const Vector& lambda, Index k) {
    auto mean = [&](double log_alpha) {
        const double a = std::exp(log_alpha);
        double s = 0.0;
        for (double l : lambda) s += a * l / (a * l + 1.0);
        return s;
    };
    double lo = -std::log(lambda.front()) - 60.0;
    double hi = -std::log(lambda.back()) + 60.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean(mid) < double(k) ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace

bool SampleSet::contains(Index i) const { return std::binary_search(indices.begin(), indices.end(), i); }

SampleSet make_sample_set(std::vector<Index> indices, Index universe) {
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
        throw std::invalid_argument("SampleSet: duplicate index");
    if (!indices.empty() && indices.back() >= universe) throw std::invalid_argument("SampleSet: index out of range");
    return SampleSet{std::move(indices), universe};
}

DppKernel DppKernel::from_matrix(DenseMatrix L, bool validate) {
    if (L.rows() != L.cols()) throw std::invalid_argument("DppKernel: kernel must be square");
    if (validate) {
        double scale = 0.0, asym = 0.0;
        for (Index i = 0; i < L.rows(); ++i)
            for (Index j = 0; j < L.cols(); ++j) {
                scale = std::max(scale, std::abs(L(i, j)));
                asym = std::max(asym, std::abs(L(i, j) - L(j, i)));
            }
        if (asym > 1e-10 * std::max(scale, 1e-300)) throw std::invalid_argument("DppKernel: kernel is not symmetric");
        const SymmetricEigen e = symmetric_eigen(L);
        if (!e.values.empty() && e.values.back() < -1e-10 * std::max(e.values.front(), 0.0))
            throw std::invalid_argument("DppKernel: kernel is not positive semidefinite");
    }
    DppKernel K;
    K.L_ = std::move(L);
    return K;
}

DppKernel DppKernel::from_factor(DenseMatrix F) {
    DppKernel K;
    K.F_ = std::move(F);
    return K;
}

Index DppKernel::size() const noexcept { return L_ ? L_->rows() : F_->rows(); }

double DppKernel::entry(Index i, Index j) const {
    if (L_) return (*L_)(i, j);
    const auto a = F_->row(i), b = F_->row(j);
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

DenseMatrix DppKernel::restrict_to(std::span<const Index> idx) const {
    if (L_) return principal_submatrix(*L_, idx);
    const DenseMatrix rows = gather_rows(*F_, idx);
    return matmat(rows, transpose(rows));
}

DenseMatrix DppKernel::dense() const {
    if (L_) return *L_;
    return matmat(*F_, transpose(*F_));
}

SampleSet uniform_coupon_sample(Index m, Index tau, Rng& rng) {
    if (m == 0 || tau == 0) throw std::invalid_argument("uniform_coupon_sample: m and tau must be positive");
    std::vector<char> seen(m, 0);
    std::vector<Index> out;
    out.reserve(std::min(m, tau));
    for (Index draw = 0; draw < tau; ++draw) {
        const Index i = rng.below(m);
        if (!seen[i]) {
            seen[i] = 1;
            out.push_back(i);
        }
    }
    std::sort(out.begin(), out.end());
    return SampleSet{std::move(out), m};
}

Index coupon_calls_to_collect(Index m, Index t, std::span<const Index> exclude, Rng& rng) {
    if (t + exclude.size() > m) throw std::invalid_argument("coupon_calls_to_collect: not enough fresh indices");
    std::vector<char> seen(m, 0);
    for (Index i : exclude) seen.at(i) = 1;
    Index calls = 0, fresh = 0;
    while (fresh < t) {
        const Index i = rng.below(m);
        ++calls;
        if (!seen[i]) {
            seen[i] = 1;
            ++fresh;
        }
    }
    return calls;
}

Pmf kdpp_pmf_bruteforce(const DppKernel& K, Index k) {
    const Index m = K.size();
    if (m > 16) throw std::invalid_argument("kdpp_pmf_bruteforce: enumeration limited to m <= 16");
    if (k < 1 || k > m) throw std::invalid_argument("kdpp_pmf_bruteforce: need 1 <= k <= m");
    const DenseMatrix L = K.dense();
    double diag_max = 0.0;
    for (Index i = 0; i < m; ++i) diag_max = std::max(diag_max, L(i, i));
    Pmf pmf;
    double total = 0.0;
    for_each_subset(m, k, [&](const std::vector<Index>& idx) {
        const double d = std::max(0.0, determinant(principal_submatrix(L, idx)));
        pmf.emplace(SampleSet{idx, m}, d);
        total += d;
    });
    if (!(total > 1e-13 * std::pow(diag_max, double(k))))
        throw std::domain_error("k exceeds rank support");
    for (auto& [set, p] : pmf) p /= total;
    return pmf;
}

std::vector<double> kdpp_marginals_exact(const DppKernel& K, Index k) {
    const Pmf pmf = kdpp_pmf_bruteforce(K, k);
    std::vector<double> marg(K.size(), 0.0);
    for (const auto& [set, p] : pmf)
        for (Index i : set.indices) marg[i] += p;
    return marg;
}

KdppSampler::KdppSampler(const DppKernel& K, Index k) : m_(K.size()), k_(k) {
    if (k > m_) throw std::invalid_argument("exact_kdpp_sample: k exceeds the ground set");
    if (k == 0) return;
    const SymmetricEigen e = symmetric_eigen(K.dense());
    const double lmax = e.values.empty() ? 0.0 : e.values.front();
    Index r = 0;
    while (r < m_ && lmax > 0.0 && e.values[r] > 1e-12 * lmax) ++r;
    if (r < k) throw std::domain_error("kernel rank below k");
    vectors_ = DenseMatrix(m_, r);
    for (Index i = 0; i < m_; ++i)
        for (Index c = 0; c < r; ++c) vectors_(i, c) = e.vectors(i, c);
    if (r > k) {
        const Vector lambda(e.values.begin(), e.values.begin() + static_cast<std::ptrdiff_t>(r));
        const double alpha = balancing_scale(lambda, k);
        inclusion_.resize(r);
        for (Index i = 0; i < r; ++i) inclusion_[i] = alpha * lambda[i] / (alpha * lambda[i] + 1.0);
    }
}

SampleSet KdppSampler::draw(Rng& rng) const {
    if (k_ == 0) return SampleSet{{}, m_};
    std::vector<Index> selected;
    if (inclusion_.empty()) {
        selected.resize(k_);
        std::iota(selected.begin(), selected.end(), Index{0});
    } else {
        for (long trial = 0;; ++trial) {
            if (trial >= kRejectionCap)
                throw std::runtime_error("exact_kdpp_sample: rejection loop exceeded 1e6 trials");
            selected.clear();
            for (Index i = 0; i < inclusion_.size() && selected.size() <= k_; ++i)
                if (rng.uniform() < inclusion_[i]) selected.push_back(i);
            if (selected.size() == k_) break;
        }
    }
    std::vector<Vector> cols(k_, Vector(m_));
    for (Index c = 0; c < k_; ++c)
        for (Index j = 0; j < m_; ++j) cols[c][j] = vectors_(j, selected[c]);
    return SampleSet{sample_projection_dpp(std::move(cols), rng), m_};
}

SampleSet exact_kdpp_sample(const DppKernel& K, Index k, Rng& rng) { return KdppSampler(K, k).draw(rng); }

SampleSet greedy_initial_set(const DppKernel& K, Index k) {
    const Index m = K.size();
    if (k > m) throw std::domain_error("kernel rank below k");
    Vector d(m);
    double dmax = 0.0;
    for (Index i = 0; i < m; ++i) {
        d[i] = K.entry(i, i);
        dmax = std::max(dmax, d[i]);
    }
    std::vector<Vector> factors;
    std::vector<Index> chosen;
    std::vector<char> used(m, 0);
    for (Index step = 0; step < k; ++step) {
        Index best = m;
        for (Index i = 0; i < m; ++i)
            if (!used[i] && (best == m || d[i] > d[best])) best = i;
        if (best == m || !(d[best] > 1e-12 * dmax)) throw std::domain_error("kernel rank below k");
        const double piv = std::sqrt(d[best]);
        Vector f(m, 0.0);
        for (Index i = 0; i < m; ++i) {
            if (used[i] || i == best) continue;
            double v = K.entry(i, best);
            for (const Vector& g : factors) v -= g[i] * g[best];
            f[i] = v / piv;
            d[i] -= f[i] * f[i];
        }
        f[best] = piv;
        used[best] = 1;
        chosen.push_back(best);
        factors.push_back(std::move(f));
    }
    std::sort(chosen.begin(), chosen.end());
    return SampleSet{std::move(chosen), m};
}

SampleSet downup_walk(const DppKernel& K, Index k, Index t, Index n_steps, Rng& rng, const SampleSet* start) {
    const Index m = K.size();
    if (k > t || t > m) throw std::invalid_argument("downup_walk: need k <= t <= m");
    SampleSet S = start ? *start : greedy_initial_set(K, k);
    if (S.size() != k || S.universe != m) throw std::invalid_argument("downup_walk: start set has the wrong shape");
    if (t == k) return S;

    std::vector<char> member(m, 0);
    std::vector<Index> T;
    T.reserve(t);
    for (Index step = 0; step < n_steps; ++step) {
        T.assign(S.indices.begin(), S.indices.end());
        for (Index i : T) member[i] = 1;
        while (T.size() < t) {
            const Index i = rng.below(m);
            if (!member[i]) {
                member[i] = 1;
                T.push_back(i);
            }
        }
        for (Index i : T) member[i] = 0;
        std::sort(T.begin(), T.end());
        const DppKernel local = DppKernel::from_matrix(K.restrict_to(T), false);
        const SampleSet inner = exact_kdpp_sample(local, k, rng);
        std::vector<Index> next(k);
        for (Index c = 0; c < k; ++c) next[c] = T[inner.indices[c]];
        S = SampleSet{std::move(next), m};
    }
    return S;
}

double total_variation(const Pmf& p, const Pmf& q) {
    double tv = 0.0;
    for (const auto& [set, pv] : p) {
        const auto it = q.find(set);
        tv += std::abs(pv - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [set, qv] : q)
        if (!p.count(set)) tv += qv;
    return 0.5 * tv;
}

Pmf empirical_pmf(const std::vector<SampleSet>& draws) {
    Pmf pmf;
    if (draws.empty()) return pmf;
    const double w = 1.0 / double(draws.size());
    for (const SampleSet& s : draws) pmf[s] += w;
    return pmf;
}

}  // namespace stsolve
