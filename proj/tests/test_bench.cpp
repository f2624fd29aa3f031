#include <gtest/gtest.h>

#include <sstream>

#include "stsolve/bench.hpp"

using namespace stsolve;

namespace {

const char* kConfig = R"(# two small problems
solvers = coordinate_descent, cg, kaczmarz
problems = sq, tall
eps = 1e-6
seed = 3
sq.m = 64
sq.n = 64
sq.k = 4
sq.head_cond = 100
sq.tail_spread = 1.1
tall.m = 120
tall.n = 40
tall.k = 2
tall.consistency = inconsistent
tall.noise = 0.2
tall.tau = 8
)";

BenchConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_bench_config(in);
}

}  // namespace

TEST(BenchConfig, ParsesKeys) {
    const BenchConfig c = parse(kConfig);
    EXPECT_EQ(c.solvers, (std::vector<std::string>{"coordinate_descent", "cg", "kaczmarz"}));
    ASSERT_EQ(c.problems.size(), 2u);
    EXPECT_EQ(c.problems[0].id, "sq");
    EXPECT_EQ(c.problems[0].spec.k, 4u);
    EXPECT_EQ(c.problems[0].spec.seed, 3u);
    EXPECT_EQ(c.problems[1].spec.consistency, Consistency::Inconsistent);
    EXPECT_EQ(c.problems[1].tau, 8u);
    EXPECT_DOUBLE_EQ(c.eps, 1e-6);
}

TEST(BenchConfig, RejectsUnknownSolverWithValidList) {
    try {
        parse("solvers = cg, magic\n");
        FAIL();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("magic"), std::string::npos);
        for (const auto& n : solver_names()) EXPECT_NE(msg.find(n), std::string::npos);
    }
}

TEST(BenchConfig, RejectsMalformedLines) {
    EXPECT_THROW(parse("eps 1e-6\n"), std::invalid_argument);
    EXPECT_THROW(parse("eps = fast\n"), std::invalid_argument);
    EXPECT_THROW(parse("colour = blue\n"), std::invalid_argument);
    EXPECT_THROW(parse("problems = a\na.mass = 3\n"), std::invalid_argument);
    EXPECT_THROW(parse("b.m = 3\n"), std::invalid_argument);
}

TEST(RunBench, EmptySolverListGivesHeaderOnlyCsv) {
    const BenchReport r = run_bench(parse("problems = p\np.m = 16\np.n = 16\np.k = 2\n"));
    std::ostringstream out;
    write_csv(out, r);
    EXPECT_EQ(out.str(), std::string(kCsvHeader) + "\n");
}

TEST(RunBench, RowsPerCellAndSensibleValues) {
    const BenchReport r = run_bench(parse(kConfig));
    ASSERT_EQ(r.rows.size(), 6u);
    EXPECT_EQ(r.rows[0].problem_id, "sq");
    EXPECT_EQ(r.rows[0].solver, "coordinate_descent");
    EXPECT_EQ(r.rows[4].solver, "cg");
    for (const BenchRow& row : r.rows) {
        EXPECT_GE(row.final_rel_residual, 0.0);
        EXPECT_GT(row.flops, 0u);
        EXPECT_EQ(row.residual_history.size(), row.iterations + 1);
    }
    EXPECT_EQ(r.rows[3].tau, 8u);
    EXPECT_FALSE(r.environment.empty());
}

TEST(RunBench, DeterministicAndThreadCountIndependent) {
    BenchConfig c = parse(kConfig);
    const BenchReport a = run_bench(c);
    c.jobs = 3;
    const BenchReport b = run_bench(c);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (Index i = 0; i < a.rows.size(); ++i) {
        BenchRow x = a.rows[i], y = b.rows[i];
        x.wall_ms = y.wall_ms = 0.0;
        EXPECT_EQ(x, y);
    }
    c.seed = 4;
    for (auto& p : c.problems) p.spec.seed = 4;
    const BenchReport d = run_bench(c);
    EXPECT_NE(d.rows[0].residual_history, a.rows[0].residual_history);
}

TEST(Reports, CsvRoundTripIsLossless) {
    const BenchReport r = run_bench(parse(kConfig));
    std::stringstream ss;
    write_csv(ss, r);
    const std::vector<BenchRow> back = read_csv(ss);
    ASSERT_EQ(back.size(), r.rows.size());
    for (Index i = 0; i < back.size(); ++i) {
        BenchRow expect = r.rows[i];
        expect.converged = false;
        expect.residual_history.clear();
        expect.error_history.clear();
        EXPECT_EQ(back[i], expect);
    }
}

TEST(Reports, JsonRoundTripIsLossless) {
    const BenchReport r = run_bench(parse(kConfig));
    const nlohmann::json j = nlohmann::json::parse(to_json(r).dump());
    const BenchReport back = report_from_json(j);
    EXPECT_EQ(back.rows, r.rows);
    EXPECT_EQ(back.environment, r.environment);
}

TEST(Reports, CsvRejectsWrongHeader) {
    std::istringstream in("a,b,c\n");
    EXPECT_THROW(read_csv(in), std::invalid_argument);
}

TEST(RunNamedSolver, UnknownNameThrows) {
    EXPECT_THROW(run_named_solver("nope", DenseMatrix::identity(2), Vector{1, 1}, RunOptions{}), std::invalid_argument);
}

TEST(RunNamedSolver, AllSolversRunOnSmallProblem) {
    ProblemSpec s;
    s.m = 48;
    s.n = 32;
    s.k = 2;
    s.head_cond = 10;
    const Problem p = gen_spiked(s);
    RunOptions opt;
    opt.cfg.eps = 1e-6;
    opt.cfg.k = 2;
    for (const auto& name : solver_names()) {
        const SolveReport r = run_named_solver(name, p.A, p.b, opt);
        const BenchRow row = make_row("p", name, p.A, p.b, 2, r);
        EXPECT_LE(row.final_rel_residual, 1e-2) << name;
    }
}
