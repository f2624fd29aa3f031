#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "stsolve/dense_matrix.hpp"

namespace stsolve {

// Snapshot handed to SolverConfig::observer after every outer iteration.
struct IterationView {
    Index iteration = 0;
    std::span<const double> x;  // current iterate in the caller's coordinates
    std::span<const double> y;  // maintained A x (coordinate descent only)
};

struct SolverConfig {
    Index tau = 0;            // block size; 0 derives it from k
    Index k = 1;              // guessed number of large singular values
    double C = 0.025;         // tau = clamp(C k ln(dim)^3, k + 1, dim / 4)
    Index s_max = 0;          // inner CG iterations; 0 derives from the embedding band
    Index t_max = 0;          // outer iterations; 0 derives 50 (r / tau) ln(1 / eps)
    double eps = 1e-6;
    std::uint64_t seed = 0;
    double eps_embed = 0.5;
    double delta_embed = 0.0;  // 0 uses rho / 324 with rho estimated as tau / r
    double c_phi = 4.0;
    double c_s = 2.0;
    double rank_tol = 1e-12;
    Index check_every = 0;     // residual checks; 0 means every ceil(r / tau) iterations
    Index rht_retries = 1;     // fresh transforms drawn after an unconverged run
    Index burn_in = 0;         // down-up steps per PSD sample; 0 means 10 ceil(ln n)
    Index walk_superset = 0;   // superset size of the down-up walk; 0 means 2 tau
    Index inner_t_max = 0;     // least squares inner iterations; 0 derives it like t_max from inner_eps
    double inner_eps = 1e-3;   // least squares inner normal-residual target
    std::optional<Vector> reference;  // known solution; enables error_history
    std::function<void(const IterationView&)> observer;
};

struct SolveReport {
    std::string solver;
    Vector solution;
    Vector residual_history;  // one entry per iterate, x_0 included
    Vector error_history;     // filled when a reference solution is given
    Index iterations_run = 0;
    std::uint64_t flop_count = 0;     // work the algorithm needs, stopping checks included
    std::uint64_t monitor_flops = 0;  // extra work spent only on recording histories
    double wall_time = 0.0;           // seconds
    bool converged = false;
    double fitted_rate = 1.0;
    Index tau = 0;
    Index s_max = 0;
    Index attempts = 0;
    std::string diagnostic;
};

Index derive_tau(Index k, Index dim, double C);
Index derive_s_max(double rho, double eps_embed);
// Per-iterate squared decay factor fitted by least squares on log history.
double fitted_decay_rate(std::span<const double> history);

SolveReport solve_kaczmarz(const DenseMatrix& A, std::span<const double> b, const SolverConfig& cfg);

// Solves Aᵀ A x = c.
SolveReport solve_coordinate_descent(const DenseMatrix& A, std::span<const double> c, const SolverConfig& cfg);
// Least squares through c = Aᵀ b, monitoring the true residual ||A x - b|| in O(m).
SolveReport solve_normal_equations(const DenseMatrix& A, std::span<const double> b, const SolverConfig& cfg);

SolveReport solve_psd(const DenseMatrix& A, std::span<const double> b, const SolverConfig& cfg);

SolveReport solve_least_squares(const DenseMatrix& A, std::span<const double> b, const SolverConfig& cfg);

// Doubles the guessed head size until ||A x - b||^2 <= eps ||b||^2.
SolveReport solve_auto(const DenseMatrix& A, std::span<const double> b, double eps, const SolverConfig& base_cfg);

}  // namespace stsolve
