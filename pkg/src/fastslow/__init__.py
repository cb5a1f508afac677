"""Solvers and benchmarks for rapidly dissipative fast-slow ODE systems.

The library integrates the slow variables of systems

    dx/dt = f(x, y),    dy/dt = (1/eps) g(x, y)

with slow-manifold models of increasing order and, on top of those, a
hierarchy of extrapolated correction grids that raises the modeling order
without shrinking the macro step.  The harness submodule runs configured
experiments, fits convergence slopes, and writes CSV results; the `fastslow`
console script exposes it.
"""
from __future__ import annotations

from .extrap import Stencil, StencilError, StencilHistory, extrapolate, lebesgue_constant
from .harness import (
    CSV_HEADER,
    ExperimentSpec,
    RowResult,
    SweepResult,
    compare_cost,
    drift_demo,
    ensure_reference,
    fit_slope,
    parse_config,
    run,
    run_row,
    sup_norm_error,
    sweep,
)
from .manifold import (
    ManifoldError,
    ManifoldEvaluator,
    correction,
    default_eta,
    force,
    force_ladder,
    gamma,
    manifold_ladder,
)
from .micro import INVERTER_METHODS, InverterSpec, MicroSolverError, default_inverter, invert_g
from .mgt import (
    ConfigError,
    GridHierarchy,
    InstabilityError,
    LayerResult,
    MgtConfig,
    ParameterHint,
    RunRecord,
    SolverError,
    rk4_step,
    solve_hmm,
    solve_initial_layer,
    solve_mgt,
    solve_reference,
    solve_two_grid,
    suggest_parameters,
)
from .presets import PRESETS, load_preset
from .system import (
    Counters,
    DimensionError,
    FastSlowSystem,
    PROBLEM_IDS,
    ProblemError,
    default_initial_state,
    eval_f,
    eval_g,
    make_problem,
)

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "Counters",
    "DimensionError",
    "ExperimentSpec",
    "FastSlowSystem",
    "GridHierarchy",
    "INVERTER_METHODS",
    "InstabilityError",
    "InverterSpec",
    "LayerResult",
    "ManifoldError",
    "ManifoldEvaluator",
    "MgtConfig",
    "MicroSolverError",
    "PRESETS",
    "PROBLEM_IDS",
    "ParameterHint",
    "ProblemError",
    "RowResult",
    "RunRecord",
    "SolverError",
    "Stencil",
    "StencilError",
    "StencilHistory",
    "SweepResult",
    "compare_cost",
    "correction",
    "default_eta",
    "default_initial_state",
    "default_inverter",
    "drift_demo",
    "ensure_reference",
    "eval_f",
    "eval_g",
    "extrapolate",
    "fit_slope",
    "force",
    "force_ladder",
    "gamma",
    "invert_g",
    "lebesgue_constant",
    "load_preset",
    "make_problem",
    "manifold_ladder",
    "parse_config",
    "rk4_step",
    "run",
    "run_row",
    "solve_hmm",
    "solve_initial_layer",
    "solve_mgt",
    "solve_reference",
    "solve_two_grid",
    "suggest_parameters",
    "sup_norm_error",
    "sweep",
]
