#include "stsolve/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "stsolve/flops.hpp"
#include "stsolve/linalg.hpp"
#include "stsolve/random.hpp"

namespace stsolve {

const std::vector<std::string>& solver_names() {
    static const std::vector<std::string> names = {"kaczmarz", "coordinate_descent", "psd", "least_squares",
                                                   "auto",     "cg",                 "direct"};
    return names;
}

namespace {

std::string joined_names() {
    std::string out;
    for (const auto& n : solver_names()) out += (out.empty() ? "" : ", ") + n;
    return out;
}

void require_known(const std::string& name) {
    const auto& names = solver_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw std::invalid_argument("unknown solver '" + name + "'; valid solvers: " + joined_names());
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Index parse_index(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long x = 0;
    try {
        x = std::stoull(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty() || v[0] == '-')
        throw std::invalid_argument("config key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    return static_cast<Index>(x);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || !std::isfinite(x))
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
    return x;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double relative_residual(const DenseMatrix& A, std::span<const double> x, std::span<const double> b) {
    const double bn = norm2(b);
    Vector r = matvec(A, x);
    for (Index i = 0; i < r.size(); ++i) r[i] -= b[i];
    return bn > 0.0 ? norm2(r) / bn : norm2(r);
}

}  // namespace

SolveReport run_named_solver(const std::string& name, const DenseMatrix& A, std::span<const double> b,
                             const RunOptions& opt) {
    require_known(name);
    const SolverConfig& cfg = opt.cfg;
    if (name == "kaczmarz") return solve_kaczmarz(A, b, cfg);
    if (name == "coordinate_descent") return solve_normal_equations(A, b, cfg);
    if (name == "least_squares") return solve_least_squares(A, b, cfg);
    if (name == "auto") return solve_auto(A, b, cfg.eps, cfg);
    if (name == "cg") {
        const Index cap = opt.max_iter > 0 ? opt.max_iter : 10 * std::max<Index>(A.cols(), 1);
        return baseline_cg(A, b, cfg.eps, cap, cfg.reference);
    }
    if (name == "psd") {
        if (A.rows() == A.cols()) {
            bool symmetric = true;
            for (Index i = 0; i < A.rows() && symmetric; ++i)
                for (Index j = i + 1; j < A.cols(); ++j)
                    if (A(i, j) != A(j, i)) {
                        symmetric = false;
                        break;
                    }
            if (symmetric) return solve_psd(A, b, cfg);
        }
        // General A: run on the normal equations AᵀA x = Aᵀb.
        const DenseMatrix G = matmat_tn(A, A);
        const Vector c = matvec_transpose(A, b);
        SolveReport rep = solve_psd(G, c, cfg);
        return rep;
    }
    // direct
    SolveReport rep;
    rep.solver = "direct";
    rep.attempts = 1;
    const std::uint64_t f0 = flops::count();
    const auto start = std::chrono::steady_clock::now();
    rep.solution = baseline_direct(A, b);
    rep.flop_count = flops::count() - f0;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.residual_history = {norm2(b)};
    rep.converged = true;
    return rep;
}

BenchConfig parse_bench_config(std::istream& in) {
    BenchConfig cfg;
    std::map<std::string, std::map<std::string, std::string>> per_problem;
    std::vector<std::string> problem_ids;
    bool solvers_given = false;
    std::string line;
    Index lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");

        if (const auto dot = key.find('.'); dot != std::string::npos) {
            per_problem[key.substr(0, dot)][key.substr(dot + 1)] = value;
        } else if (key == "solvers") {
            cfg.solvers = split_list(value, ',');
            for (const auto& s : cfg.solvers) require_known(s);
            solvers_given = true;
        } else if (key == "problems") {
            problem_ids = split_list(value, ',');
        } else if (key == "eps") {
            cfg.eps = parse_double(key, value);
        } else if (key == "seed") {
            cfg.seed = parse_index(key, value);
        } else if (key == "tau") {
            cfg.tau = parse_index(key, value);
        } else if (key == "k") {
            cfg.k = parse_index(key, value);
        } else if (key == "C") {
            cfg.C = parse_double(key, value);
        } else if (key == "t_max") {
            cfg.t_max = parse_index(key, value);
        } else if (key == "s_max") {
            cfg.s_max = parse_index(key, value);
        } else if (key == "max_iter") {
            cfg.max_iter = parse_index(key, value);
        } else if (key == "jobs") {
            cfg.jobs = std::max<Index>(1, parse_index(key, value));
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    if (!solvers_given) cfg.solvers = {};
    if (!(cfg.eps > 0.0 && cfg.eps <= 1.0)) throw std::invalid_argument("config: eps must lie in (0, 1]");

    for (const auto& [id, _] : per_problem)
        if (std::find(problem_ids.begin(), problem_ids.end(), id) == problem_ids.end())
            throw std::invalid_argument("config: keys given for problem '" + id + "' which is not listed in problems");
    for (const auto& id : problem_ids) {
        BenchProblem p;
        p.id = id;
        p.spec.seed = cfg.seed;
        for (const auto& [key, value] : per_problem[id]) {
            const std::string full = id + "." + key;
            if (key == "m") p.spec.m = parse_index(full, value);
            else if (key == "n") p.spec.n = parse_index(full, value);
            else if (key == "k") p.spec.k = parse_index(full, value);
            else if (key == "head_cond") p.spec.head_cond = parse_double(full, value);
            else if (key == "tail_spread") p.spec.tail_spread = parse_double(full, value);
            else if (key == "head_floor") p.spec.head_floor = parse_double(full, value);
            else if (key == "noise") p.spec.noise = parse_double(full, value);
            else if (key == "consistency") p.spec.consistency = parse_consistency(value);
            else if (key == "seed") p.spec.seed = parse_index(full, value);
            else if (key == "tau") p.tau = parse_index(full, value);
            else throw std::invalid_argument("config: unknown problem key '" + full + "'");
        }
        cfg.problems.push_back(std::move(p));
    }
    return cfg;
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_bench_config(in);
}

BenchRow make_row(const std::string& problem_id, const std::string& solver, const DenseMatrix& A,
                  std::span<const double> b, Index k, const SolveReport& rep) {
    BenchRow row;
    row.problem_id = problem_id;
    row.solver = solver;
    row.m = A.rows();
    row.n = A.cols();
    row.k = k;
    row.tau = rep.tau;
    row.iterations = rep.iterations_run;
    row.flops = rep.flop_count;
    row.wall_ms = rep.wall_time * 1e3;
    row.final_rel_residual = relative_residual(A, rep.solution, b);
    row.fitted_rate = rep.fitted_rate;
    row.converged = rep.converged;
    row.residual_history = rep.residual_history;
    row.error_history = rep.error_history;
    return row;
}

BenchReport run_bench(const BenchConfig& config) {
    BenchReport report;
    report.environment = {
        {"library", "stsolve"},
        {"compiler", __VERSION__},
        {"cxx_standard", std::to_string(__cplusplus)},
        {"jobs", std::to_string(config.jobs)},
        {"eps", format_double(config.eps)},
        {"seed", std::to_string(config.seed)},
    };

    std::vector<Problem> problems;
    problems.reserve(config.problems.size());
    for (const auto& p : config.problems) problems.push_back(gen_spiked(p.spec));

    const Index n_solvers = config.solvers.size();
    const Index n_cells = problems.size() * n_solvers;
    std::vector<BenchRow> rows(n_cells);
    std::vector<std::string> errors(n_cells);
    std::atomic<Index> next{0};

    auto worker = [&]() {
        for (Index cell = next++; cell < n_cells; cell = next++) {
            const Index pi = cell / n_solvers, si = cell % n_solvers;
            const BenchProblem& bp = config.problems[pi];
            const Problem& prob = problems[pi];
            RunOptions opt;
            opt.cfg.eps = config.eps;
            opt.cfg.tau = bp.tau > 0 ? bp.tau : config.tau;
            opt.cfg.k = config.k > 0 ? config.k : std::max<Index>(1, bp.spec.k);
            opt.cfg.C = config.C;
            opt.cfg.t_max = config.t_max;
            opt.cfg.s_max = config.s_max;
            opt.cfg.seed = Rng(config.seed, cell)();
            opt.cfg.reference = prob.x_star;
            opt.max_iter = config.max_iter;
            const std::string& name = config.solvers[si];
            try {
                const SolveReport rep = run_named_solver(name, prob.A, prob.b, opt);
                rows[cell] = make_row(bp.id, name, prob.A, prob.b, bp.spec.k, rep);
            } catch (const std::exception& e) {
                errors[cell] = bp.id + "/" + name + ": " + e.what();
            }
        }
    };
    const Index jobs = std::max<Index>(1, std::min(config.jobs, std::max<Index>(n_cells, 1)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (Index j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("bench cell failed: " + e);
    report.rows = std::move(rows);
    return report;
}

const char* const kCsvHeader =
    "problem_id,solver,m,n,k,tau,iterations,flops,wall_ms,final_rel_residual,fitted_rate";

void write_csv(std::ostream& out, const BenchReport& report) {
    out << kCsvHeader << '\n';
    for (const auto& r : report.rows) {
        out << r.problem_id << ',' << r.solver << ',' << r.m << ',' << r.n << ',' << r.k << ',' << r.tau << ','
            << r.iterations << ',' << r.flops << ',' << format_double(r.wall_ms) << ','
            << format_double(r.final_rel_residual) << ',' << format_double(r.fitted_rate) << '\n';
    }
}

std::vector<BenchRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader)
        throw std::invalid_argument("read_csv: missing or unexpected header");
    std::vector<BenchRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 11) throw std::invalid_argument("read_csv: expected 11 fields, got " + std::to_string(f.size()));
        BenchRow r;
        r.problem_id = f[0];
        r.solver = f[1];
        r.m = parse_index("m", f[2]);
        r.n = parse_index("n", f[3]);
        r.k = parse_index("k", f[4]);
        r.tau = parse_index("tau", f[5]);
        r.iterations = parse_index("iterations", f[6]);
        r.flops = parse_index("flops", f[7]);
        r.wall_ms = parse_double("wall_ms", f[8]);
        r.final_rel_residual = parse_double("final_rel_residual", f[9]);
        r.fitted_rate = parse_double("fitted_rate", f[10]);
        rows.push_back(std::move(r));
    }
    return rows;
}

nlohmann::json to_json(const BenchReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"problem_id", r.problem_id},
                        {"solver", r.solver},
                        {"m", r.m},
                        {"n", r.n},
                        {"k", r.k},
                        {"tau", r.tau},
                        {"iterations", r.iterations},
                        {"flops", r.flops},
                        {"wall_ms", r.wall_ms},
                        {"final_rel_residual", r.final_rel_residual},
                        {"fitted_rate", r.fitted_rate},
                        {"converged", r.converged},
                        {"residual_history", r.residual_history},
                        {"error_history", r.error_history}});
    }
    return {{"environment", report.environment}, {"rows", rows}};
}

BenchReport report_from_json(const nlohmann::json& j) {
    BenchReport report;
    report.environment = j.at("environment").get<std::map<std::string, std::string>>();
    for (const auto& o : j.at("rows")) {
        BenchRow r;
        r.problem_id = o.at("problem_id").get<std::string>();
        r.solver = o.at("solver").get<std::string>();
        r.m = o.at("m").get<Index>();
        r.n = o.at("n").get<Index>();
        r.k = o.at("k").get<Index>();
        r.tau = o.at("tau").get<Index>();
        r.iterations = o.at("iterations").get<Index>();
        r.flops = o.at("flops").get<std::uint64_t>();
        r.wall_ms = o.at("wall_ms").get<double>();
        r.final_rel_residual = o.at("final_rel_residual").get<double>();
        r.fitted_rate = o.at("fitted_rate").get<double>();
        r.converged = o.at("converged").get<bool>();
        r.residual_history = o.at("residual_history").get<Vector>();
        r.error_history = o.at("error_history").get<Vector>();
        report.rows.push_back(std::move(r));
    }
    return report;
}

}  // namespace stsolve
