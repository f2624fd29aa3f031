#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stsolve/bench.hpp"
#include "stsolve/esp.hpp"
#include "stsolve/generators.hpp"
#include "stsolve/linalg.hpp"
#include "stsolve/matrix_io.hpp"
#include "stsolve/rht.hpp"
#include "stsolve/sampling.hpp"
#include "stsolve/solvers.hpp"

namespace py = pybind11;
using namespace stsolve;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    const auto r = static_cast<Index>(a.shape(0)), c = static_cast<Index>(a.shape(1));
    return DenseMatrix(r, c, std::vector<double>(a.data(), a.data() + r * c));
}

Vector to_vector(const Array& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return Vector(a.data(), a.data() + a.shape(0));
}

Array from_matrix(const DenseMatrix& A) {
    Array out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(A.rows()), static_cast<py::ssize_t>(A.cols())});
    std::copy(A.data(), A.data() + A.size(), out.mutable_data());
    return out;
}

Array from_vector(const Vector& v) {
    Array out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

SolverConfig make_config(const py::kwargs& kw) {
    SolverConfig cfg;
    for (const auto& [key, value] : kw) {
        const auto name = key.cast<std::string>();
        if (name == "tau") cfg.tau = value.cast<Index>();
        else if (name == "k") cfg.k = value.cast<Index>();
        else if (name == "C") cfg.C = value.cast<double>();
        else if (name == "s_max") cfg.s_max = value.cast<Index>();
        else if (name == "t_max") cfg.t_max = value.cast<Index>();
        else if (name == "eps") cfg.eps = value.cast<double>();
        else if (name == "seed") cfg.seed = value.cast<std::uint64_t>();
        else if (name == "eps_embed") cfg.eps_embed = value.cast<double>();
        else if (name == "delta_embed") cfg.delta_embed = value.cast<double>();
        else if (name == "check_every") cfg.check_every = value.cast<Index>();
        else if (name == "rht_retries") cfg.rht_retries = value.cast<Index>();
        else if (name == "burn_in") cfg.burn_in = value.cast<Index>();
        else if (name == "walk_superset") cfg.walk_superset = value.cast<Index>();
        else if (name == "inner_t_max") cfg.inner_t_max = value.cast<Index>();
        else if (name == "inner_eps") cfg.inner_eps = value.cast<double>();
        else if (name == "reference") cfg.reference = to_vector(value.cast<Array>());
        else throw py::key_error("unknown solver option '" + name + "'");
    }
    return cfg;
}

py::dict report_dict(const SolveReport& r) {
    py::dict d;
    d["solver"] = r.solver;
    d["solution"] = from_vector(r.solution);
    d["residual_history"] = from_vector(r.residual_history);
    d["error_history"] = from_vector(r.error_history);
    d["iterations"] = r.iterations_run;
    d["flops"] = r.flop_count;
    d["wall_time"] = r.wall_time;
    d["converged"] = r.converged;
    d["fitted_rate"] = r.fitted_rate;
    d["tau"] = r.tau;
    d["s_max"] = r.s_max;
    d["diagnostic"] = r.diagnostic;
    return d;
}

template <class F>
auto solver_binding(F f) {
    return [f](const Array& A, const Array& b, const py::kwargs& kw) {
        const DenseMatrix M = to_matrix(A);
        const Vector v = to_vector(b);
        const SolverConfig cfg = make_config(kw);
        SolveReport rep;
        {
            py::gil_scoped_release release;
            rep = f(M, v, cfg);
        }
        return report_dict(rep);
    };
}

}  // namespace

PYBIND11_MODULE(_stsolve, m) {
    m.doc() = "Sketch-and-project linear system solvers";

    m.def("solve_kaczmarz", solver_binding(solve_kaczmarz), py::arg("A"), py::arg("b"));
    m.def("solve_coordinate_descent", solver_binding(solve_coordinate_descent), py::arg("A"), py::arg("c"));
    m.def("solve_normal_equations", solver_binding(solve_normal_equations), py::arg("A"), py::arg("b"));
    m.def("solve_psd", solver_binding(solve_psd), py::arg("A"), py::arg("b"));
    m.def("solve_least_squares", solver_binding(solve_least_squares), py::arg("A"), py::arg("b"));
    m.def(
        "solve_auto",
        [](const Array& A, const Array& b, double eps, const py::kwargs& kw) {
            return report_dict(solve_auto(to_matrix(A), to_vector(b), eps, make_config(kw)));
        },
        py::arg("A"), py::arg("b"), py::arg("eps"));
    m.def(
        "baseline_cg",
        [](const Array& A, const Array& b, double eps, Index max_iter) {
            return report_dict(baseline_cg(to_matrix(A), to_vector(b), eps, max_iter));
        },
        py::arg("A"), py::arg("b"), py::arg("eps") = 1e-6, py::arg("max_iter") = 1000);
    m.def(
        "baseline_direct", [](const Array& A, const Array& b) {
            return from_vector(baseline_direct(to_matrix(A), to_vector(b)));
        },
        py::arg("A"), py::arg("b"));

    m.def(
        "gen_spiked",
        [](Index rows, Index cols, Index k, double head_cond, double tail_spread, double head_floor,
           const std::string& consistency, double noise, std::uint64_t seed) {
            ProblemSpec spec;
            spec.m = rows;
            spec.n = cols;
            spec.k = k;
            spec.head_cond = head_cond;
            spec.tail_spread = tail_spread;
            spec.head_floor = head_floor;
            spec.consistency = parse_consistency(consistency);
            spec.noise = noise;
            spec.seed = seed;
            const Problem p = gen_spiked(spec);
            return py::make_tuple(from_matrix(p.A), from_vector(p.b), from_vector(p.x_star),
                                  from_vector(p.singular_values));
        },
        py::arg("m"), py::arg("n"), py::arg("k"), py::arg("head_cond") = 100.0, py::arg("tail_spread") = 1.0,
        py::arg("head_floor") = 10.0, py::arg("consistency") = "consistent", py::arg("noise") = 0.0,
        py::arg("seed") = 0);

    m.def("singular_values", [](const Array& A) { return from_vector(spectral_profile(to_matrix(A)).singular_values); });
    m.def(
        "tail_condition",
        [](const Array& sigma, Index k) {
            const Vector s = to_vector(sigma);
            return tail_condition(profile_from_values(s, s.size(), s.size()), k);
        },
        py::arg("sigma"), py::arg("k"));
    m.def("fwht", [](const Array& v) {
        Vector x = to_vector(v);
        fwht_inplace(x);
        return from_vector(x);
    });
    m.def("esp", [](const Array& lambda) { return from_vector(esp_all(to_vector(lambda)).values); });
    m.def(
        "expected_projection",
        [](const Array& A, Index k) { return from_matrix(expected_projection_exact(to_matrix(A), k)); },
        py::arg("A"), py::arg("k"));
    m.def(
        "coupon_sample",
        [](Index universe, Index tau, std::uint64_t seed) {
            Rng rng(seed);
            return uniform_coupon_sample(universe, tau, rng).indices;
        },
        py::arg("m"), py::arg("tau"), py::arg("seed") = 0);
    m.def(
        "kdpp_sample",
        [](const Array& L, Index k, Index count, std::uint64_t seed) {
            const DppKernel K = DppKernel::from_matrix(to_matrix(L));
            const KdppSampler sampler(K, k);
            Rng rng(seed);
            std::vector<std::vector<Index>> out;
            for (Index i = 0; i < count; ++i) out.push_back(sampler.draw(rng).indices);
            return out;
        },
        py::arg("L"), py::arg("k"), py::arg("count") = 1, py::arg("seed") = 0);
    m.def(
        "kdpp_pmf",
        [](const Array& L, Index k) {
            py::dict out;
            for (const auto& [set, p] : kdpp_pmf_bruteforce(DppKernel::from_matrix(to_matrix(L)), k))
                out[py::tuple(py::cast(set.indices))] = p;
            return out;
        },
        py::arg("L"), py::arg("k"));

    m.def("load_matrix", [](const std::string& path) { return from_matrix(load_matrix(path)); });
    m.def(
        "save_matrix",
        [](const std::string& path, const Array& A, const std::string& format) {
            save_matrix(path, to_matrix(A), parse_format(format));
        },
        py::arg("path"), py::arg("A"), py::arg("format") = "mm");
    m.attr("solver_names") = solver_names();
}
