"""Micro-solvers: invert the fast field, solving g(x, y) = r for y.

Three interchangeable methods: fixed-step relaxation (forward Euler on the
shifted fast dynamics, which contracts when g is dissipative in y), damped
Newton with a finite-difference Jacobian, and closed-form inversion where
the system provides one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .system import Counters, FastSlowSystem, eval_g

INVERTER_METHODS = ("Relaxation", "Newton", "Exact")


class MicroSolverError(RuntimeError):
    """Raised when a micro-solve cannot produce a valid root."""


@dataclass(frozen=True)
class InverterSpec:
    """Configuration of one micro-solver.

    Relaxation advances y by relax_dt_factor * (g(x,y) - r) for a fixed
    relax_steps; the factor is the micro step divided by eps.  Newton uses
    newton_tol on the residual |g - r| relative to 1 + |r|, with step
    halving and a finite-difference Jacobian of relative step
    fd_jacobian_step.  Exact delegates to the system's closed form.
    """

    method: str = "Newton"
    relax_dt_factor: float = 0.1
    relax_steps: int = 10
    newton_tol: float = 1e-12
    newton_max_iter: int = 25
    fd_jacobian_step: float = 1e-7

    def __post_init__(self) -> None:
        if self.method not in INVERTER_METHODS:
            raise MicroSolverError(
                f"unknown micro method {self.method!r} (known: {', '.join(INVERTER_METHODS)})"
            )
        if self.relax_dt_factor <= 0 or self.relax_steps < 1:
            raise MicroSolverError(
                f"relaxation needs a positive step factor and step count, got "
                f"{self.relax_dt_factor}, {self.relax_steps}"
            )
        if self.newton_tol <= 0 or self.newton_max_iter < 1 or self.fd_jacobian_step <= 0:
            raise MicroSolverError(
                f"Newton needs positive tolerance, iteration budget, and FD step, got "
                f"{self.newton_tol}, {self.newton_max_iter}, {self.fd_jacobian_step}"
            )


def default_inverter(problem_id: str) -> InverterSpec:
    """Micro-solver used by each benchmark in the source experiments."""
    if problem_id == "CubicChua":
        return InverterSpec("Relaxation", relax_dt_factor=0.1, relax_steps=10)
    if problem_id == "LinearRotation":
        return InverterSpec("Relaxation", relax_dt_factor=1.0, relax_steps=10)
    if problem_id == "Lorenz96":
        return InverterSpec("Relaxation", relax_dt_factor=0.5, relax_steps=20)
    if problem_id in ("Robertson", "Enzyme", "LinearDrift"):
        return InverterSpec("Exact")
    return InverterSpec("Newton")


def _default_guess(sys: FastSlowSystem, x: np.ndarray) -> np.ndarray:
    if sys.analytic_gamma is not None:
        return np.asarray(sys.analytic_gamma(x), dtype=float)
    return np.zeros(sys.n_y)


def _relaxation(sys, x, r, spec, y, counters):
    for _ in range(spec.relax_steps):
        y = y + spec.relax_dt_factor * (eval_g(sys, x, y, counters) - r)
        if not np.all(np.isfinite(y)):
            raise MicroSolverError(
                f"relaxation diverged on {sys.name} at x={x!r} "
                f"(factor {spec.relax_dt_factor}, {spec.relax_steps} steps)"
            )
    return y


def _newton(sys, x, r, spec, y, counters):
    res = eval_g(sys, x, y, counters) - r
    target = spec.newton_tol * (1.0 + float(np.linalg.norm(r)))
    for _ in range(spec.newton_max_iter):
        res_norm = float(np.linalg.norm(res))
        if not np.isfinite(res_norm):
            raise MicroSolverError(f"Newton residual became non-finite on {sys.name}")
        if res_norm <= target:
            return y
        jac = np.empty((sys.n_y, sys.n_y))
        for j in range(sys.n_y):
            h = spec.fd_jacobian_step * (1.0 + abs(float(y[j])))
            yh = y.copy()
            yh[j] += h
            jac[:, j] = (eval_g(sys, x, yh, counters) - res - r) / h
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise MicroSolverError(f"Newton Jacobian is singular on {sys.name}") from exc
        lam = 1.0
        while True:
            y_try = y + lam * step
            res_try = eval_g(sys, x, y_try, counters) - r
            if np.linalg.norm(res_try) < res_norm:
                y, res = y_try, res_try
                break
            lam *= 0.5
            if lam < 2.0**-20:
                raise MicroSolverError(
                    f"Newton found no descent direction on {sys.name} (residual {res_norm:.3e})"
                )
    res_norm = float(np.linalg.norm(res))
    if res_norm <= target:
        return y
    raise MicroSolverError(
        f"Newton did not converge on {sys.name} after {spec.newton_max_iter} iterations "
        f"(residual {res_norm:.3e}, tolerance {target:.3e})"
    )


def invert_g(
    sys: FastSlowSystem,
    x: np.ndarray,
    r: np.ndarray,
    spec: InverterSpec,
    y_guess: np.ndarray | None = None,
    counters: Counters | None = None,
    count_micro_call: bool = True,
) -> np.ndarray:
    """Solve g(x, y) = r for y.

    Increments the micro-call counter by 1 and the g-evaluation counter by
    actual use.  The micro-call counter tallies manifold site visits, so
    refinement solves that reuse an already-counted site pass
    count_micro_call=False; their g-evaluations are still charged.
    """
    if x.shape != (sys.n_x,) or r.shape != (sys.n_y,):
        raise MicroSolverError(
            f"{sys.name}: expected shapes ({sys.n_x},)/({sys.n_y},), got {x.shape}/{r.shape}"
        )
    if counters is not None and count_micro_call:
        counters.micro_calls += 1
    y = _default_guess(sys, x) if y_guess is None else np.asarray(y_guess, dtype=float)
    if spec.method == "Exact":
        if sys.exact_inverter is None:
            raise MicroSolverError(f"{sys.name} has no closed-form inverse of g")
        y_star = np.asarray(sys.exact_inverter(x, r), dtype=float)
    elif spec.method == "Relaxation":
        y_star = _relaxation(sys, x, r, spec, y, counters)
    else:
        y_star = _newton(sys, x, r, spec, y, counters)
    if not np.all(np.isfinite(y_star)):
        raise MicroSolverError(f"micro-solve returned non-finite values on {sys.name}")
    return y_star
