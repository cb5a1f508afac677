"""Benchmark library of fast-slow ODE systems.

Each system is a pair dx/dt = f(x, y), dy/dt = (1/eps) g(x, y) whose fast
variable y relaxes rapidly onto a slow manifold.  `make_problem` builds the
named benchmark with its literature constants, attaching closed-form
oracles (manifold, effective forces, inverse of g) where they exist.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class ProblemError(ValueError):
    """Raised for unknown problems, bad parameters, or bad overrides."""


class DimensionError(ValueError):
    """Raised when an evaluation receives vectors of the wrong shape."""


@dataclass
class Counters:
    """Per-run cost counters.

    micro_calls counts micro-problem site solves (order-zero manifold
    inversions); f_evals and g_evals count raw field evaluations.
    """

    f_evals: int = 0
    g_evals: int = 0
    micro_calls: int = 0

    def snapshot(self) -> "Counters":
        return Counters(self.f_evals, self.g_evals, self.micro_calls)


@dataclass(frozen=True)
class FastSlowSystem:
    """Immutable description of one fast-slow system.

    Evaluation counters deliberately live outside this object (see
    `Counters`); a system value is safe to share between concurrent runs.
    """

    name: str
    n_x: int
    n_y: int
    eps: float
    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    g: Callable[[np.ndarray, np.ndarray], np.ndarray]
    analytic_gamma: Callable[[np.ndarray], np.ndarray] | None = None
    analytic_force: Callable[[int, np.ndarray], np.ndarray] | None = None
    exact_inverter: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    beta_hint: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_x < 1 or self.n_y < 1:
            raise ProblemError(f"dimensions must be positive, got n_x={self.n_x}, n_y={self.n_y}")
        if not (self.eps > 0.0 and np.isfinite(self.eps)):
            raise ProblemError(f"eps must be positive and finite, got {self.eps}")


def eval_f(sys: FastSlowSystem, x: np.ndarray, y: np.ndarray, counters: Counters | None = None) -> np.ndarray:
    """Evaluate the slow field f(x, y), counting the call."""
    if x.shape != (sys.n_x,) or y.shape != (sys.n_y,):
        raise DimensionError(
            f"{sys.name}: expected shapes ({sys.n_x},)/({sys.n_y},), got {x.shape}/{y.shape}"
        )
    if counters is not None:
        counters.f_evals += 1
    return sys.f(x, y)


def eval_g(sys: FastSlowSystem, x: np.ndarray, y: np.ndarray, counters: Counters | None = None) -> np.ndarray:
    """Evaluate the fast field g(x, y) (without the 1/eps factor), counting the call."""
    if x.shape != (sys.n_x,) or y.shape != (sys.n_y,):
        raise DimensionError(
            f"{sys.name}: expected shapes ({sys.n_x},)/({sys.n_y},), got {x.shape}/{y.shape}"
        )
    if counters is not None:
        counters.g_evals += 1
    return sys.g(x, y)


def analytic_slow_force(sys: FastSlowSystem, k: int, x: np.ndarray) -> np.ndarray:
    """Closed-form effective slow force F_k(x), where the system carries one."""
    if sys.analytic_force is None:
        raise ProblemError(f"{sys.name} has no closed-form slow forces")
    return sys.analytic_force(k, x)


_J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _merge_params(name: str, defaults: dict, overrides: dict | None) -> dict:
    params = dict(defaults)
    for key, value in (overrides or {}).items():
        if key not in defaults:
            known = ", ".join(sorted(defaults)) or "none"
            raise ProblemError(f"{name} has no parameter {key!r} (known: {known})")
        params[key] = value
    return params


def _make_linear_drift(eps: float, params: dict) -> FastSlowSystem:
    # dx/dt = x + y, dy/dt = (1/eps)((J - I)x - y); the slow dynamics drift
    # off the pure rotation Jx by O(eps) amplitude growth and phase shift.
    JmI = _J2 - np.eye(2)
    m1 = eps * np.eye(2) + (1.0 + eps) * _J2
    m2 = (eps + 3.0 * eps**2) * np.eye(2) + (1.0 + eps - eps**2 - 2.0 * eps**3) * _J2
    force_mats = {0: _J2.copy(), 1: m1, 2: m2}

    def force(k: int, x: np.ndarray) -> np.ndarray:
        if k not in force_mats:
            raise ProblemError(f"LinearDrift closed-form forces cover orders 0..2, got {k}")
        return force_mats[k] @ x

    return FastSlowSystem(
        name="LinearDrift",
        n_x=2,
        n_y=2,
        eps=eps,
        f=lambda x, y: x + y,
        g=lambda x, y: JmI @ x - y,
        analytic_gamma=lambda x: JmI @ x,
        analytic_force=force,
        exact_inverter=lambda x, r: JmI @ x - r,
        beta_hint=1.0,
        params=params,
    )


def _make_linear_rotation(eps: float, params: dict) -> FastSlowSystem:
    # dx/dt = -J y, dy/dt = (1/eps)(x - y); y tracks x, and the slow
    # variables rotate with an O(eps^{k+1}) model error per manifold order.
    return FastSlowSystem(
        name="LinearRotation",
        n_x=2,
        n_y=2,
        eps=eps,
        f=lambda x, y: -(_J2 @ y),
        g=lambda x, y: x - y,
        analytic_gamma=lambda x: x.copy(),
        exact_inverter=lambda x, r: x - r,
        beta_hint=1.0,
        params=params,
    )


def _make_cubic_chua(eps: float, params: dict) -> FastSlowSystem:
    a, b = params["a"], params["b"]
    c1, c2, c3 = params["c1"], params["c2"], params["c3"]
    # -dg/dy = 3 c3 y^2 + 2 c2 y + c1 has negative discriminant for the
    # default constants, so dissipation holds globally with this rate.
    beta = c1 - c2**2 / (3.0 * c3)
    return FastSlowSystem(
        name="CubicChua",
        n_x=2,
        n_y=1,
        eps=eps,
        f=lambda x, y: np.array([-x[1], x[0] + a * x[1] - b * y[0]]),
        g=lambda x, y: np.array([x[1] - c3 * y[0] ** 3 - c2 * y[0] ** 2 - c1 * y[0]]),
        beta_hint=beta if beta > 0 else None,
        params=params,
    )


def _make_lorenz96(eps: float, params: dict) -> FastSlowSystem:
    J, K = params["J"], params["K"]
    a, b, h = params["a"], params["b"], params["h"]
    if J < 1 or K < 4:
        raise ProblemError(f"Lorenz96 needs J >= 1 and K >= 4, got J={J}, K={K}")
    hb = h / b

    # Fast variables are stored flattened row-major by (k, j): index k*J + j
    # for slow site k in 0..K-1 and fast mode j in 0..J-1.
    def f(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        Y = y.reshape(K, J)
        return -np.roll(x, 1) * (np.roll(x, 2) - np.roll(x, -1)) - x + a - hb * Y.sum(axis=1)

    def g(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        Y = y.reshape(K, J)
        adv = -b * np.roll(Y, -1, axis=1) * (np.roll(Y, -2, axis=1) - np.roll(Y, 1, axis=1))
        return (adv - Y + hb * x[:, None]).reshape(-1)

    def gamma(x: np.ndarray) -> np.ndarray:
        # With all fast modes equal per site the advection term vanishes,
        # so g = 0 exactly at y_{j,k} = (h/b) x_k.
        return np.repeat(hb * x, J)

    return FastSlowSystem(
        name="Lorenz96",
        n_x=K,
        n_y=K * J,
        eps=eps,
        f=f,
        g=g,
        analytic_gamma=gamma,
        params=params,
    )


def _make_robertson(eps: float, params: dict) -> FastSlowSystem:
    # Two-variable eps-scaled Robertson kinetics; g is quadratic in y, so
    # the micro-problem has a closed-form stable root.
    def g_scalar(x: float, y: float) -> float:
        return 0.04 * x - (1.0 - x - eps * y) * y - 0.3 * y * y

    def invert(x: np.ndarray, r: np.ndarray) -> np.ndarray:
        # Solve (0.3 - eps) y^2 + (1 - x) y - (0.04 x - r) = 0 for the root
        # connected to y = 0; the rationalized form avoids cancellation
        # when 0.04 x - r is small.
        q = 0.3 - eps
        lin = 1.0 - x[0]
        rhs = 0.04 * x[0] - r[0]
        disc = lin * lin + 4.0 * q * rhs
        if disc < 0.0 or q <= 0.0:
            raise ProblemError(
                f"Robertson micro-problem has no real root at x={x[0]}, r={r[0]}, eps={eps}"
            )
        return np.array([2.0 * rhs / (lin + np.sqrt(disc))])

    return FastSlowSystem(
        name="Robertson",
        n_x=1,
        n_y=1,
        eps=eps,
        f=lambda x, y: np.array([-0.04 * x[0] + (1.0 - x[0] - eps * y[0]) * y[0]]),
        g=lambda x, y: np.array([g_scalar(x[0], y[0])]),
        exact_inverter=invert,
        params=params,
    )


def _make_enzyme(eps: float, params: dict) -> FastSlowSystem:
    c = params["c"]
    return FastSlowSystem(
        name="Enzyme",
        n_x=1,
        n_y=1,
        eps=eps,
        f=lambda x, y: np.array([-x[0] + (x[0] + c) * y[0]]),
        g=lambda x, y: np.array([x[0] - (x[0] + 1.0) * y[0]]),
        exact_inverter=lambda x, r: np.array([(x[0] - r[0]) / (x[0] + 1.0)]),
        beta_hint=1.0,
        params=params,
    )


_REGISTRY: dict[str, tuple[Callable[[float, dict], FastSlowSystem], dict]] = {
    "LinearDrift": (_make_linear_drift, {}),
    "LinearRotation": (_make_linear_rotation, {}),
    "CubicChua": (_make_cubic_chua, {"a": 0.1, "b": 0.7, "c1": 11.0, "c2": 41.0 / 2.0, "c3": 44.0 / 3.0}),
    "Lorenz96": (_make_lorenz96, {"J": 10, "K": 36, "a": 1.0, "b": 10.0, "h": 1.0 / 36.0}),
    "Robertson": (_make_robertson, {}),
    "Enzyme": (_make_enzyme, {"c": 0.5}),
}

PROBLEM_IDS = tuple(_REGISTRY)


def make_problem(problem_id: str, eps: float, overrides: dict | None = None) -> FastSlowSystem:
    """Build a benchmark system by name with optional parameter overrides."""
    if problem_id not in _REGISTRY:
        raise ProblemError(f"unknown problem {problem_id!r} (known: {', '.join(PROBLEM_IDS)})")
    if not (isinstance(eps, (int, float)) and eps > 0.0 and np.isfinite(eps)):
        raise ProblemError(f"eps must be positive and finite, got {eps!r}")
    builder, defaults = _REGISTRY[problem_id]
    params = _merge_params(problem_id, defaults, overrides)
    return builder(float(eps), params)


def default_initial_state(problem_id: str, overrides: dict | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Literature initial condition (x0, y0) for a benchmark problem."""
    if problem_id not in _REGISTRY:
        raise ProblemError(f"unknown problem {problem_id!r} (known: {', '.join(PROBLEM_IDS)})")
    _, defaults = _REGISTRY[problem_id]
    params = _merge_params(problem_id, defaults, overrides)
    if problem_id == "LinearDrift":
        return np.array([0.2, 0.0]), np.array([0.0, 0.0])
    if problem_id == "LinearRotation":
        return np.array([1.0, 0.0]), np.array([0.9, 0.1])
    if problem_id == "CubicChua":
        return np.array([0.2, 0.0]), np.array([0.0])
    if problem_id == "Lorenz96":
        K, J = params["K"], params["J"]
        k = np.arange(1, K + 1, dtype=float)
        z = (1.0 + 2.0 * k) / K - 1.0
        return z * (z - 1.0) * (z + 1.0), np.zeros(K * J)
    # Robertson and Enzyme share scalar initial data.
    return np.array([1.0]), np.array([0.0])
