"""Time-integration drivers for fast-slow systems.

Contains the RK4 macro-stepper, the stiff coupled reference solver, the
initial-layer integrator, the naive slow-model solver (order-k manifold
force only), and the corrected solvers that extrapolate higher-order force
increments from one or more nested coarse grids.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .extrap import StencilHistory, extrapolate
from .manifold import ManifoldEvaluator, default_eta, force, force_ladder, gamma, manifold_ladder
from .micro import InverterSpec, default_inverter
from .system import Counters, FastSlowSystem, eval_f

STATE_NORM_CAP = 1e6

STRATEGIES = ("Field", "Manifold")
CORRECTION_MODES = ("extrapolate", "zero", "exact")


class ConfigError(ValueError):
    """Raised for invalid solver configuration."""


class SolverError(RuntimeError):
    """Raised when an integration cannot continue."""


class InstabilityError(SolverError):
    """Raised when the state norm exceeds the stability cap."""


@dataclass(frozen=True)
class GridHierarchy:
    """Nested time grids: level ell has step tau_ell = P^ell * dt."""

    dt: float
    P: int
    L: int

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and np.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.L < 0:
            raise ConfigError(f"level count must be non-negative, got {self.L}")
        if self.L >= 1 and (int(self.P) != self.P or self.P < 2):
            raise ConfigError(f"refinement factor must be an integer >= 2, got {self.P}")

    def tau(self, level: int) -> float:
        if not 0 <= level <= self.L:
            raise ConfigError(f"level {level} outside 0..{self.L}")
        return self.P**level * self.dt


@dataclass(frozen=True)
class MgtConfig:
    """Solver configuration for the corrected schemes.

    k is the base manifold order, L the number of correction levels, P the
    grid refinement factor, m the extrapolation window length minus one.
    dt_coupled is the step for full-system integration (initial layer),
    and the layer exits once |y - Gamma_{k+L}(x)| <= layer_factor *
    eps^{k+L+1} or at time layer_time_factor * eps * |log eps|.
    """

    k: int
    L: int
    P: int
    m: int
    dt: float
    T: float
    dt_coupled: float
    strategy: str = "Field"
    inverter: InverterSpec | None = None
    eta: float | None = None
    max_order: int | None = None
    layer_factor: float = 5.0
    layer_time_factor: float = 10.0

    def __post_init__(self) -> None:
        if self.k < 0 or self.L < 0 or self.m < 0:
            raise ConfigError(f"orders must be non-negative, got k={self.k}, L={self.L}, m={self.m}")
        if not (self.T > 0.0 and np.isfinite(self.T)):
            raise ConfigError(f"final time must be positive, got {self.T}")
        if not (0.0 < self.dt <= self.T):
            raise ConfigError(f"dt must lie in (0, T], got dt={self.dt}, T={self.T}")
        if not (0.0 < self.dt_coupled <= self.dt):
            raise ConfigError(
                f"coupled step must satisfy 0 < dt_coupled <= dt, got {self.dt_coupled} vs {self.dt}"
            )
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r} (known: {', '.join(STRATEGIES)})")
        if self.strategy == "Manifold" and self.L > 1:
            raise ConfigError("the Manifold correction strategy supports a single level only")
        if self.max_order is not None and self.k + self.L > self.max_order:
            raise ConfigError(
                f"k + L = {self.k + self.L} exceeds the evaluator order budget {self.max_order}"
            )
        GridHierarchy(self.dt, self.P if self.L >= 1 else max(int(self.P), 2), self.L)

    @property
    def order_budget(self) -> int:
        return self.max_order if self.max_order is not None else self.k + self.L


@dataclass
class RunRecord:
    """Trajectory samples and cost counters of one solver run."""

    times: np.ndarray
    states: np.ndarray
    counters: Counters
    config: dict
    warnings: list[str] = field(default_factory=list)
    wall_ms: float = 0.0
    cost_trace: np.ndarray | None = None
    fast_states: np.ndarray | None = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class LayerResult:
    """Handoff state after integrating through the initial layer."""

    t_exit: float
    x: np.ndarray
    y: np.ndarray
    steps: int
    residual: float
    warning: str | None = None


@dataclass(frozen=True)
class ParameterHint:
    """Advisory parameter choices balancing the scheme's error sources."""

    m: int
    P: int
    dt_hint: float
    tau_hints: tuple[float, ...]
    warning: bool


def rk4_step(field: Callable[[float, np.ndarray], np.ndarray], t: float, x: np.ndarray, dt: float) -> np.ndarray:
    """One classic fourth-order Runge-Kutta step of a time-dependent field."""
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")
    k1 = field(t, x)
    k2 = field(t + 0.5 * dt, x + (0.5 * dt) * k1)
    k3 = field(t + 0.5 * dt, x + (0.5 * dt) * k2)
    k4 = field(t + dt, x + dt * k3)
    out = x + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    if not np.all(np.isfinite(out)):
        raise SolverError(f"non-finite state after RK4 step at t={t}")
    return out


def _count_steps(span: float, dt: float, what: str) -> int:
    n = round(span / dt)
    if n < 1 or abs(n * dt - span) > 1e-9 * max(1.0, abs(span)):
        raise ConfigError(
            f"{what}: interval {span} is not an integer number of steps of {dt}"
        )
    return n


def _check_norm(x: np.ndarray, t: float, label: str) -> None:
    m = float(np.max(np.abs(x)))
    if not np.isfinite(m) or m > STATE_NORM_CAP:
        raise InstabilityError(f"{label} unstable at t={t:.6g}: state norm {m:.3e}")


def _full_rk4_step(sys: FastSlowSystem, x: np.ndarray, y: np.ndarray, dt: float, counters: Counters | None):
    """One RK4 step of the coupled stiff system.

    Calls sys.f/sys.g directly for speed; the shape contract is checked
    once by the callers and the counters are bumped by the exact call
    count (4 each) here.
    """
    inv_eps = 1.0 / sys.eps
    k1x = sys.f(x, y)
    k1y = sys.g(x, y) * inv_eps
    x2, y2 = x + (0.5 * dt) * k1x, y + (0.5 * dt) * k1y
    k2x = sys.f(x2, y2)
    k2y = sys.g(x2, y2) * inv_eps
    x3, y3 = x + (0.5 * dt) * k2x, y + (0.5 * dt) * k2y
    k3x = sys.f(x3, y3)
    k3y = sys.g(x3, y3) * inv_eps
    x4, y4 = x + dt * k3x, y + dt * k3y
    k4x = sys.f(x4, y4)
    k4y = sys.g(x4, y4) * inv_eps
    if counters is not None:
        counters.f_evals += 4
        counters.g_evals += 4
    return (
        x + (dt / 6.0) * (k1x + 2.0 * (k2x + k3x) + k4x),
        y + (dt / 6.0) * (k1y + 2.0 * (k2y + k3y) + k4y),
    )


def solve_reference(
    sys: FastSlowSystem,
    x0: np.ndarray,
    y0: np.ndarray,
    dt_ref: float,
    T: float,
    sample_stride: int = 1,
    keep_fast: bool = True,
) -> RunRecord:
    """Integrate the full coupled system accurately; the ground truth.

    dt_ref should resolve the fast scale (dt_ref <= 0.5 eps for explicit
    stability).  Samples are kept every sample_stride steps plus the final
    state.
    """
    if x0.shape != (sys.n_x,) or y0.shape != (sys.n_y,):
        raise ConfigError(
            f"{sys.name}: expected shapes ({sys.n_x},)/({sys.n_y},), got {x0.shape}/{y0.shape}"
        )
    if sample_stride < 1:
        raise ConfigError(f"sample stride must be at least 1, got {sample_stride}")
    n = _count_steps(T, dt_ref, "reference")
    t_wall = time.perf_counter()
    counters = Counters()
    x, y = x0.astype(float).copy(), y0.astype(float).copy()
    sample_idx = [0]
    xs = [x.copy()]
    ys = [y.copy()] if keep_fast else None
    for i in range(n):
        x, y = _full_rk4_step(sys, x, y, dt_ref, counters)
        _check_norm(x, (i + 1) * dt_ref, "reference")
        _check_norm(y, (i + 1) * dt_ref, "reference")
        if (i + 1) % sample_stride == 0 or i + 1 == n:
            sample_idx.append(i + 1)
            xs.append(x.copy())
            if keep_fast:
                ys.append(y.copy())
    times = np.array(sample_idx, dtype=float) * dt_ref
    times[-1] = T
    return RunRecord(
        times=times,
        states=np.vstack(xs),
        counters=counters,
        config={"method": "reference", "dt_ref": dt_ref, "T": T, "eps": sys.eps},
        wall_ms=1e3 * (time.perf_counter() - t_wall),
        fast_states=np.vstack(ys) if keep_fast else None,
    )


def solve_initial_layer(
    sys: FastSlowSystem,
    x0: np.ndarray,
    y0: np.ndarray,
    cfg: MgtConfig,
    evaluator: ManifoldEvaluator | None = None,
) -> LayerResult:
    """Integrate the full system until y reaches the order-(k+L) manifold.

    Exits once |y - Gamma_{k+L}(x)| <= layer_factor * eps^{k+L+1} or at
    the time cap layer_time_factor * eps * |log eps|, whichever comes
    first, then continues to the next multiple of cfg.dt so the slow
    solver starts on its own grid.  A warning is set when the cap fires
    with the residual still above ten times the threshold.
    """
    evaluator = evaluator if evaluator is not None else _build_evaluator(sys, cfg)
    k_target = cfg.k + cfg.L
    dt_coupled = cfg.dt_coupled
    dt_align = cfg.dt
    eps = sys.eps
    threshold = cfg.layer_factor * eps ** (k_target + 1)
    t_cap = cfg.layer_time_factor * eps * abs(math.log(eps))
    x, y = x0.astype(float).copy(), y0.astype(float).copy()
    t = 0.0
    steps = 0
    residual = float(np.linalg.norm(y - gamma(evaluator, k_target, x)))
    capped = False
    while residual > threshold:
        if t >= t_cap - 1e-15:
            capped = True
            break
        step = min(dt_coupled, t_cap - t)
        x, y = _full_rk4_step(sys, x, y, step, evaluator.counters)
        t += step
        steps += 1
        _check_norm(x, t, "initial layer")
        _check_norm(y, t, "initial layer")
        residual = float(np.linalg.norm(y - gamma(evaluator, k_target, x)))
    warning = None
    if capped and residual > 10.0 * threshold:
        warning = (
            f"initial layer hit the time cap {t_cap:.3e} with residual "
            f"{residual:.3e} above 10x threshold {threshold:.3e}"
        )
    # Align the handoff to the macro grid so sample times stay multiples
    # of dt_align from zero.
    t_snap = math.ceil(t / dt_align - 1e-12) * dt_align
    while t < t_snap - 1e-15:
        step = min(dt_coupled, t_snap - t)
        x, y = _full_rk4_step(sys, x, y, step, evaluator.counters)
        t += step
        steps += 1
    return LayerResult(t_exit=t_snap if steps else 0.0, x=x, y=y, steps=steps, residual=residual, warning=warning)


def _build_evaluator(sys: FastSlowSystem, cfg: MgtConfig) -> ManifoldEvaluator:
    return ManifoldEvaluator(
        sys=sys,
        inverter=cfg.inverter if cfg.inverter is not None else default_inverter(sys.name),
        eta=cfg.eta if cfg.eta is not None else default_eta(sys.name),
        max_order=cfg.order_budget,
    )


def _record(config: dict, times, states, counters, cost_rows, warnings) -> RunRecord:
    return RunRecord(
        times=times,
        states=np.vstack(states),
        counters=counters,
        config=config,
        warnings=warnings,
        cost_trace=np.array(cost_rows, dtype=np.int64),
    )


def _run_corrected(
    sys: FastSlowSystem,
    ev: ManifoldEvaluator,
    cfg: MgtConfig,
    x_start: np.ndarray,
    t_start: float,
    correction_mode: str,
) -> RunRecord:
    """Shared driver for the plain and grid-corrected slow solvers.

    Phases: while the coarsest stencil is filling (the first m * P^L fine
    steps), integrate the exact order-(k+L) force with the fine step; after
    that, integrate the order-k force plus one extrapolated increment per
    level.  Every level-ell grid node evaluates one ladder to the highest
    order due at that node, feeding all coincident stencils.
    """
    if correction_mode not in CORRECTION_MODES:
        raise ConfigError(f"unknown correction mode {correction_mode!r}")
    k, L, P, m = cfg.k, cfg.L, cfg.P, cfg.m
    n = _count_steps(cfg.T - t_start, cfg.dt, "slow solver")
    t_wall = time.perf_counter()
    dt = cfg.dt
    counters = ev.counters
    warnings: list[str] = []
    x = x_start.astype(float).copy()
    states = [x.copy()]
    cost_rows = [(counters.micro_calls, counters.f_evals, counters.g_evals)]

    plain = L == 0 or correction_mode == "zero"
    use_manifold = cfg.strategy == "Manifold" and not plain and correction_mode == "extrapolate"

    def plain_field(t: float, xx: np.ndarray) -> np.ndarray:
        return force(ev, k, xx)

    def exact_corrected_field(t: float, xx: np.ndarray) -> np.ndarray:
        ladder = force_ladder(ev, k + 1, xx)
        return ladder[k] + (ladder[k + 1] - ladder[k])

    if plain:
        field = plain_field
        warm_steps = 0
        strides = []
        hists = []
    elif correction_mode == "exact":
        field = exact_corrected_field
        warm_steps = 0
        strides = []
        hists = []
    else:
        strides = [P**ell for ell in range(1, L + 1)]
        hists = [StencilHistory(m + 1) for _ in range(L)]
        warm_steps = m * P**L
        if warm_steps >= n:
            warnings.append(
                f"correction window never activated: warm-up needs {warm_steps} steps, run has {n}"
            )
        field = None  # chosen per step below

    for i in range(n):
        t = t_start + i * dt
        if hists:
            due = [ell for ell in range(1, L + 1) if i % strides[ell - 1] == 0]
            if due:
                ell_max = max(due)
                if use_manifold:
                    ys = manifold_ladder(ev, k + ell_max, x)
                    for ell in due:
                        hists[ell - 1].push(t, ys[k + ell] - ys[k + ell - 1])
                else:
                    ladder = force_ladder(ev, k + ell_max, x)
                    for ell in due:
                        hists[ell - 1].push(t, ladder[k + ell] - ladder[k + ell - 1])
            if i < warm_steps:
                field = _warmup_field(ev, k + L)
            else:
                stencils = [h.as_stencil() for h in hists]
                if use_manifold:
                    field = _manifold_corrected_field(ev, k, stencils)
                else:
                    field = _force_corrected_field(ev, k, stencils)
        x = rk4_step(field, t, x, dt)
        _check_norm(x, t + dt, "slow solver")
        states.append(x.copy())
        cost_rows.append((counters.micro_calls, counters.f_evals, counters.g_evals))

    times = t_start + dt * np.arange(n + 1)
    times[-1] = cfg.T
    config = {
        "method": "mgt" if L >= 1 else "hmm",
        "k": k,
        "L": L,
        "P": P if L >= 1 else None,
        "m": m if L >= 1 else None,
        "dt": dt,
        "T": cfg.T,
        "t_start": t_start,
        "strategy": cfg.strategy,
        "correction_mode": correction_mode,
        "eps": sys.eps,
    }
    record = _record(config, times, states, counters, cost_rows, warnings)
    record.wall_ms = 1e3 * (time.perf_counter() - t_wall)
    return record


def _warmup_field(ev: ManifoldEvaluator, order: int):
    def field(t: float, xx: np.ndarray) -> np.ndarray:
        return force(ev, order, xx)

    return field


def _force_corrected_field(ev: ManifoldEvaluator, k: int, stencils):
    def field(t: float, xx: np.ndarray) -> np.ndarray:
        out = force(ev, k, xx)
        for st in stencils:
            out = out + extrapolate(st, t)
        return out

    return field


def _manifold_corrected_field(ev: ManifoldEvaluator, k: int, stencils):
    def field(t: float, xx: np.ndarray) -> np.ndarray:
        y = gamma(ev, k, xx) + extrapolate(stencils[0], t)
        return eval_f(ev.sys, xx, y, ev.counters)

    return field


def solve_hmm(
    sys: FastSlowSystem,
    k: int,
    x_start: np.ndarray,
    dt: float,
    t_start: float,
    T: float,
    evaluator: ManifoldEvaluator,
) -> RunRecord:
    """RK4 on the order-k effective force, no corrections."""
    cfg = MgtConfig(k=k, L=0, P=2, m=0, dt=dt, T=T, dt_coupled=dt, max_order=evaluator.max_order)
    return _run_corrected(sys, evaluator, cfg, x_start, t_start, "extrapolate")


def solve_mgt(
    sys: FastSlowSystem,
    cfg: MgtConfig,
    x_start: np.ndarray,
    t_start: float = 0.0,
    evaluator: ManifoldEvaluator | None = None,
    correction_mode: str = "extrapolate",
) -> RunRecord:
    """Multi-level corrected solver; cfg.L >= 1."""
    if cfg.L < 1:
        raise ConfigError(f"corrected solver needs at least one level, got L={cfg.L}")
    ev = evaluator if evaluator is not None else _build_evaluator(sys, cfg)
    if cfg.k + cfg.L > ev.max_order:
        raise ConfigError(
            f"k + L = {cfg.k + cfg.L} exceeds the evaluator order budget {ev.max_order}"
        )
    return _run_corrected(sys, ev, cfg, x_start, t_start, correction_mode)


def solve_two_grid(
    sys: FastSlowSystem,
    cfg: MgtConfig,
    x_start: np.ndarray,
    t_start: float = 0.0,
    evaluator: ManifoldEvaluator | None = None,
    correction_mode: str = "extrapolate",
) -> RunRecord:
    """Single correction level: fine grid plus one coarse grid."""
    if cfg.L != 1:
        raise ConfigError(f"two-grid solver requires L=1, got L={cfg.L}")
    return solve_mgt(sys, cfg, x_start, t_start, evaluator, correction_mode)


def suggest_parameters(k: int, L: int, q: int, eps: float) -> ParameterHint:
    """Advisory (m, P, step) choices balancing discretization,
    extrapolation, and modeling error contributions.

    The warning flag reports when the base order is too low for the
    requested level count to pay off (k < m/(m+1) * L - 1).
    """
    if q < 1:
        raise ConfigError(f"macro-solver order must be at least 1, got {q}")
    if not (0.0 < eps < 1.0):
        raise ConfigError(f"eps must lie in (0, 1), got {eps}")
    if k < 0 or L < 0:
        raise ConfigError(f"orders must be non-negative, got k={k}, L={L}")
    if L == 0:
        # No correction levels: the window just matches the macro order
        # and the refinement factor is moot (returned as 1).
        m = q - 1
        P = 1
    else:
        m_plus = int(math.floor(q * (L + 1) / (k + L + 1) + 0.5))
        m_plus = max(1, min(m_plus, q))
        m = m_plus - 1
        P = max(2, int(math.ceil(eps ** (-1.0 / (m + 1)))))
    tau_hints = tuple(eps ** ((L + 1 - ell) / (m + 1)) for ell in range(L + 1))
    warning = L >= 1 and k < m / (m + 1) * L - 1 - 1e-12
    return ParameterHint(m=m, P=P, dt_hint=tau_hints[0], tau_hints=tau_hints, warning=warning)
