#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stsolve/bench.hpp"
#include "stsolve/generators.hpp"
#include "stsolve/linalg.hpp"
#include "stsolve/matrix_io.hpp"
#include "stsolve/solvers.hpp"
#include "stsolve/verify.hpp"

using namespace stsolve;

namespace {

struct GenArgs {
    ProblemSpec spec;
    std::string consistency = "consistent";
    std::string format = "mm";
    std::string out = "problem";
};

struct SolveArgs {
    std::string matrix;
    std::string rhs;
    std::string solver = "coordinate_descent";
    Index tau = 0;
    Index k = 1;
    double eps = 1e-6;
    std::uint64_t seed = 0;
    Index t_max = 0;
    Index s_max = 0;
    Index max_iter = 0;
    std::string format = "mm";
    std::string out;
    std::string report;
};

struct BenchArgs {
    std::string config;
    std::string out = "bench";
    Index jobs = 0;
    std::optional<double> eps;
    std::optional<std::uint64_t> seed;
    std::optional<Index> tau;
    std::optional<Index> k;
    std::optional<Index> t_max;
    std::optional<Index> s_max;
};

int run_gen(const GenArgs& a) {
    ProblemSpec spec = a.spec;
    spec.consistency = parse_consistency(a.consistency);
    const MatrixFormat fmt = parse_format(a.format);
    const Problem p = gen_spiked(spec);
    const std::string ext = format_extension(fmt);
    save_matrix(a.out + "_A" + ext, p.A, fmt);
    save_vector(a.out + "_b" + ext, p.b, fmt);
    save_vector(a.out + "_x" + ext, p.x_star, fmt);
    std::cout << "wrote " << a.out << "_{A,b,x}" << ext << " (" << spec.m << "x" << spec.n << ", k=" << spec.k
              << ")\n";
    return 0;
}

int run_solve(const SolveArgs& a) {
    const DenseMatrix A = load_matrix(a.matrix);
    const Vector b = load_vector(a.rhs);
    RunOptions opt;
    opt.cfg.tau = a.tau;
    opt.cfg.k = a.k;
    opt.cfg.eps = a.eps;
    opt.cfg.seed = a.seed;
    opt.cfg.t_max = a.t_max;
    opt.cfg.s_max = a.s_max;
    opt.max_iter = a.max_iter;
    const SolveReport rep = run_named_solver(a.solver, A, b, opt);
    const BenchRow row = make_row(a.matrix, a.solver, A, b, a.k, rep);

    std::cout << std::setprecision(6) << "solver: " << rep.solver << "\n"
              << "converged: " << (rep.converged ? "yes" : "no") << "\n"
              << "iterations: " << rep.iterations_run << "\n"
              << "tau: " << rep.tau << "\n"
              << "flops: " << rep.flop_count << "\n"
              << "wall_ms: " << rep.wall_time * 1e3 << "\n"
              << "final_rel_residual: " << row.final_rel_residual << "\n"
              << "fitted_rate: " << rep.fitted_rate << "\n";
    if (!rep.diagnostic.empty()) std::cout << "diagnostic: " << rep.diagnostic << "\n";
    if (!a.out.empty()) save_vector(a.out, rep.solution, parse_format(a.format));
    if (!a.report.empty()) {
        BenchReport br;
        br.rows.push_back(row);
        std::ofstream(a.report) << to_json(br).dump(2) << "\n";
    }
    return rep.converged ? 0 : 2;
}

int run_bench_cmd(const BenchArgs& a) {
    BenchConfig cfg = load_bench_config(a.config);
    if (a.jobs > 0) cfg.jobs = a.jobs;
    if (a.eps) cfg.eps = *a.eps;
    if (a.seed) cfg.seed = *a.seed;
    if (a.tau) cfg.tau = *a.tau;
    if (a.k) cfg.k = *a.k;
    if (a.t_max) cfg.t_max = *a.t_max;
    if (a.s_max) cfg.s_max = *a.s_max;
    const BenchReport report = run_bench(cfg);
    std::ofstream csv(a.out + ".csv");
    write_csv(csv, report);
    std::ofstream(a.out + ".json") << to_json(report).dump(2) << "\n";
    write_csv(std::cout, report);
    return 0;
}

int run_verify(std::uint64_t seed) {
    bool all = true;
    for (const CheckResult& c : run_verification(seed)) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        all = all && c.passed;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sketch-and-project linear system solvers and benchmarks"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a spiked test problem");
    g->add_option("--m", gen.spec.m, "Rows")->capture_default_str();
    g->add_option("--n", gen.spec.n, "Columns")->capture_default_str();
    g->add_option("--k", gen.spec.k, "Head size")->capture_default_str();
    g->add_option("--head-cond", gen.spec.head_cond, "sigma_1 / sigma_k")->capture_default_str();
    g->add_option("--tail-spread", gen.spec.tail_spread, "Tail condition target")->capture_default_str();
    g->add_option("--head-floor", gen.spec.head_floor, "sigma_k over the largest tail value")->capture_default_str();
    g->add_option("--noise", gen.spec.noise, "Relative off-range residual")->capture_default_str();
    g->add_option("--consistency", gen.consistency, "consistent or inconsistent")
        ->check(CLI::IsMember({"consistent", "inconsistent"}))
        ->capture_default_str();
    g->add_option("--seed", gen.spec.seed, "RNG seed")->capture_default_str();
    g->add_option("--format", gen.format, "mm or bin")->check(CLI::IsMember({"mm", "bin"}))->capture_default_str();
    g->add_option("--out", gen.out, "Output prefix")->capture_default_str();

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Solve a system read from disk");
    s->add_option("--matrix", solve.matrix, "Matrix file (MatrixMarket or STSV1)")->required();
    s->add_option("--rhs", solve.rhs, "Right-hand side file")->required();
    s->add_option("--solver", solve.solver, "Solver name")
        ->check(CLI::IsMember(solver_names()))
        ->capture_default_str();
    s->add_option("--tau", solve.tau, "Block size (0 derives it from k)")->capture_default_str();
    s->add_option("--k", solve.k, "Head-size guess")->capture_default_str();
    s->add_option("--eps", solve.eps, "Target relative accuracy")->capture_default_str();
    s->add_option("--seed", solve.seed, "RNG seed")->capture_default_str();
    s->add_option("--t-max", solve.t_max, "Outer iteration cap (0 derives it)")->capture_default_str();
    s->add_option("--s-max", solve.s_max, "Inner CG iterations (0 derives it)")->capture_default_str();
    s->add_option("--max-iter", solve.max_iter, "Iteration cap for the cg baseline")->capture_default_str();
    s->add_option("--format", solve.format, "Solution format: mm or bin")
        ->check(CLI::IsMember({"mm", "bin"}))
        ->capture_default_str();
    s->add_option("--out", solve.out, "Write the solution here");
    s->add_option("--report", solve.report, "Write a JSON report here");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Run a benchmark described by a key=value config");
    b->add_option("config", bench.config, "Config file")->required();
    b->add_option("--out", bench.out, "Output prefix for .csv and .json")->capture_default_str();
    b->add_option("--jobs", bench.jobs, "Parallel cells (overrides the config)");
    b->add_option("--eps", bench.eps, "Override eps");
    b->add_option("--seed", bench.seed, "Override seed");
    b->add_option("--tau", bench.tau, "Override tau");
    b->add_option("--k", bench.k, "Override the head-size guess");
    b->add_option("--t-max", bench.t_max, "Override t_max");
    b->add_option("--s-max", bench.s_max, "Override s_max");

    std::uint64_t verify_seed = 0;
    auto* v = app.add_subcommand("verify", "Run the property suites");
    v->add_option("--seed", verify_seed, "RNG seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try {
        if (g->parsed()) return run_gen(gen);
        if (s->parsed()) return run_solve(solve);
        if (b->parsed()) return run_bench_cmd(bench);
        if (v->parsed()) return run_verify(verify_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
