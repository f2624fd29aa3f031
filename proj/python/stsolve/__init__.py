"""Sketch-and-project solvers for linear systems with few large singular values."""

from ._stsolve import (
    baseline_cg,
    baseline_direct,
    coupon_sample,
    esp,
    expected_projection,
    fwht,
    gen_spiked,
    kdpp_pmf,
    kdpp_sample,
    load_matrix,
    save_matrix,
    singular_values,
    solve_auto,
    solve_coordinate_descent,
    solve_kaczmarz,
    solve_least_squares,
    solve_normal_equations,
    solve_psd,
    solver_names,
    tail_condition,
)

__all__ = [
    "baseline_cg",
    "baseline_direct",
    "coupon_sample",
    "esp",
    "expected_projection",
    "fwht",
    "gen_spiked",
    "kdpp_pmf",
    "kdpp_sample",
    "load_matrix",
    "save_matrix",
    "singular_values",
    "solve_auto",
    "solve_coordinate_descent",
    "solve_kaczmarz",
    "solve_least_squares",
    "solve_normal_equations",
    "solve_psd",
    "solver_names",
    "tail_condition",
]
