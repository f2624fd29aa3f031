#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "stsolve/generators.hpp"
#include "stsolve/solvers.hpp"

namespace stsolve {

// Names accepted by run_named_solver and by the bench `solvers` key.
const std::vector<std::string>& solver_names();

struct RunOptions {
    SolverConfig cfg;
    Index max_iter = 0;  // iteration cap for the cg baseline; 0 means 10 * n
};

// Dispatches on a solver name. Throws std::invalid_argument listing the valid
// names when `name` is unknown.
SolveReport run_named_solver(const std::string& name, const DenseMatrix& A, std::span<const double> b,
                             const RunOptions& opt);

struct BenchProblem {
    std::string id;
    ProblemSpec spec;
    Index tau = 0;  // per-problem override, 0 to use the global value
};

struct BenchConfig {
    std::vector<std::string> solvers;
    std::vector<BenchProblem> problems;
    double eps = 1e-6;
    std::uint64_t seed = 0;
    Index tau = 0;
    Index k = 0;  // solver head-size guess; 0 uses each problem's k
    double C = SolverConfig{}.C;
    Index t_max = 0;
    Index s_max = 0;
    Index max_iter = 0;
    Index jobs = 1;
};

// Flat key=value text. Global keys: solvers, problems, eps, seed, tau, k, C,
// t_max, s_max, max_iter, jobs. Problem keys are prefixed by the problem id:
// <id>.m, .n, .k, .head_cond, .tail_spread, .head_floor, .noise, .consistency,
// .seed, .tau. Blank lines and lines starting with '#' are ignored.
BenchConfig parse_bench_config(std::istream& in);
BenchConfig load_bench_config(const std::string& path);

struct BenchRow {
    std::string problem_id;
    std::string solver;
    Index m = 0;
    Index n = 0;
    Index k = 0;
    Index tau = 0;
    Index iterations = 0;
    std::uint64_t flops = 0;
    double wall_ms = 0.0;
    double final_rel_residual = 0.0;
    double fitted_rate = 1.0;
    bool converged = false;
    Vector residual_history;
    Vector error_history;

    bool operator==(const BenchRow&) const = default;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::map<std::string, std::string> environment;
};

// Runs every (problem, solver) cell; cells are independent and are spread
// over `jobs` threads. Rows come back in (problem, solver) order.
BenchReport run_bench(const BenchConfig& config);

BenchRow make_row(const std::string& problem_id, const std::string& solver, const DenseMatrix& A,
                  std::span<const double> b, Index k, const SolveReport& rep);

extern const char* const kCsvHeader;
void write_csv(std::ostream& out, const BenchReport& report);
std::vector<BenchRow> read_csv(std::istream& in);

nlohmann::json to_json(const BenchReport& report);
BenchReport report_from_json(const nlohmann::json& j);

}  // namespace stsolve
