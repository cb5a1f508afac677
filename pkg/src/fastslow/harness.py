"""Experiment engine: configured solver runs, eps sweeps with slope fits,
cost/error tables over system time, and the drifting-spiral demo.

Results are written as CSV with the fixed schema

    eps,method,k,L,P,m,dt,T,error_l2,micro_calls,f_evals,g_evals,wall_ms

and references are cached on disk keyed by a content hash of the problem
configuration.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .manifold import ManifoldEvaluator, default_eta
from .micro import INVERTER_METHODS, InverterSpec, default_inverter
from .mgt import (
    ConfigError,
    MgtConfig,
    RunRecord,
    solve_hmm,
    solve_initial_layer,
    solve_mgt,
    solve_reference,
)
from .system import PROBLEM_IDS, Counters, default_initial_state, make_problem

CSV_HEADER = "eps,method,k,L,P,m,dt,T,error_l2,micro_calls,f_evals,g_evals,wall_ms"
COST_HEADER = "t,method,k,L,micro_calls,f_evals,error_l2"
TRAJECTORY_HEADER = "t,method,x1,x2"

METHODS = ("Reference", "HMM", "TwoGrid", "MGT")

_METHOD_ALIASES = {
    "reference": "Reference",
    "ref": "Reference",
    "hmm": "HMM",
    "twogrid": "TwoGrid",
    "two-grid": "TwoGrid",
    "two_grid": "TwoGrid",
    "mgt": "MGT",
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a problem, a method, and the solver parameters.

    T is either a fixed final time or, when T_inverse_eps is set, the
    per-run value 1/eps.  All fields are plain values so a spec can be
    shipped to a worker process.
    """

    problem: str
    method: str
    eps_list: tuple[float, ...]
    dt: float
    T: float | None = None
    T_inverse_eps: bool = False
    k: int = 0
    L: int = 0
    P: int = 4
    m: int = 3
    dt_coupled: float | None = None
    strategy: str = "Field"
    inverter: InverterSpec | None = None
    eta: float | None = None
    layer_factor: float = 5.0
    layer_time_factor: float = 10.0
    warm_cache: bool = True
    checkpoints: tuple[float, ...] = ()
    x0: tuple[float, ...] | None = None
    y0: tuple[float, ...] | None = None
    overrides: tuple[tuple[str, float], ...] = ()
    label: str | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.problem not in PROBLEM_IDS:
            raise ConfigError(f"unknown problem {self.problem!r} (known: {', '.join(PROBLEM_IDS)})")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r} (known: {', '.join(METHODS)})")
        if not self.eps_list:
            raise ConfigError("eps list must be non-empty")
        if any(not (0.0 < e < 1.0) for e in self.eps_list):
            raise ConfigError(f"every eps must lie in (0, 1), got {self.eps_list}")
        if self.method != "Reference":
            if self.dt <= 0.0:
                raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.T is None and not self.T_inverse_eps:
            raise ConfigError("final time missing: set T to a number or to 1/eps")
        if self.T is not None and self.T_inverse_eps:
            raise ConfigError("set either a fixed T or T = 1/eps, not both")
        if self.method == "TwoGrid" and self.L != 1:
            raise ConfigError(f"the two-grid method has exactly one level, got L={self.L}")
        if self.method == "MGT" and self.L < 1:
            raise ConfigError(f"the multigrid method needs L >= 1, got L={self.L}")
        if self.method == "HMM" and self.L != 0:
            raise ConfigError(f"the plain method has no correction levels, got L={self.L}")

    def final_time(self, eps: float) -> float:
        return 1.0 / eps if self.T_inverse_eps else float(self.T)

    def method_label(self) -> str:
        if self.label is not None:
            return self.label
        if self.method == "Reference":
            return "REF"
        base = f"HMM{self.k}" if self.L == 0 else f"HMM{self.k}^{self.L}"
        if self.strategy == "Manifold":
            base += "-manifold"
        return base

    def coupled_step(self, eps: float) -> float:
        if self.dt_coupled is not None:
            return self.dt_coupled
        if self.dt > 0.0:
            return min(self.dt, 0.1 * eps)
        return 0.1 * eps  # Reference specs carry no macro step


@dataclass
class RowResult:
    """Outcome of one (spec, eps) run, ready for CSV serialization."""

    eps: float
    method: str
    k: int | None
    L: int | None
    P: int | None
    m: int | None
    dt: float
    T: float
    error_l2: float
    micro_calls: int
    f_evals: int
    g_evals: int
    wall_ms: float
    ok: bool = True
    message: str = ""
    record: RunRecord | None = None

    def csv_values(self) -> list[str]:
        def num(v):
            return "" if v is None else repr(v) if isinstance(v, float) else str(v)

        return [
            repr(self.eps),
            self.method,
            num(self.k),
            num(self.L),
            num(self.P),
            num(self.m),
            repr(self.dt),
            repr(self.T),
            "nan" if not math.isfinite(self.error_l2) else repr(self.error_l2),
            str(self.micro_calls),
            str(self.f_evals),
            str(self.g_evals),
            f"{self.wall_ms:.3f}",
        ]


@dataclass
class SweepResult:
    """Rows of one eps sweep plus the log-log slope fit."""

    method: str
    rows: list[RowResult]
    slope: float | None
    intercept: float | None
    r_squared: float | None

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)


# ------------------------------------------------------------- config files

_POWER_RE = re.compile(r"^(-?\d+(?:\.\d+)?)\^(-?\d+(?:\.\d+)?)$")

_SPEC_KEYS = {
    "problem",
    "method",
    "eps",
    "dt",
    "t",
    "k",
    "l",
    "p",
    "m",
    "dt_coupled",
    "strategy",
    "inverter",
    "relax_dt_factor",
    "relax_steps",
    "newton_tol",
    "newton_max_iter",
    "fd_jacobian_step",
    "eta",
    "layer_factor",
    "layer_time_factor",
    "warm_cache",
    "checkpoints",
    "x0",
    "y0",
    "label",
    "seed",
}


def _parse_scalar(text: str):
    token = text.strip()
    low = token.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    mt = _POWER_RE.match(token)
    if mt:
        return float(mt.group(1)) ** float(mt.group(2))
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def _parse_value(text: str):
    if "," in text:
        return tuple(_parse_scalar(part) for part in text.split(",") if part.strip())
    return _parse_scalar(text)


def parse_config(text: str) -> list[ExperimentSpec]:
    """Parse the flat key = value format with one [experiment] block per
    run; keys above the first block are shared defaults."""
    defaults: dict = {}
    blocks: list[dict] = []
    current = defaults
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line != "[experiment]":
                raise ConfigError(f"line {lineno}: unknown section {line!r}")
            blocks.append({})
            current = blocks[-1]
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if not (key in _SPEC_KEYS or key.startswith("param.")):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        current[key] = value
    if not blocks:
        blocks = [{}]
    specs = []
    for block in blocks:
        merged = {**defaults, **block}
        specs.append(_spec_from_mapping(merged))
    return specs


def _as_tuple(value) -> tuple:
    return value if isinstance(value, tuple) else (value,)


def _spec_from_mapping(mapping: dict[str, str]) -> ExperimentSpec:
    values = {key: _parse_value(val) for key, val in mapping.items()}
    if "problem" not in values:
        raise ConfigError("config block is missing the problem key")
    if "method" not in values:
        raise ConfigError("config block is missing the method key")
    problem = str(values.pop("problem"))
    method_token = str(values.pop("method")).lower()
    if method_token not in _METHOD_ALIASES:
        raise ConfigError(f"unknown method {method_token!r}")
    method = _METHOD_ALIASES[method_token]

    if "eps" not in values:
        raise ConfigError("config block is missing the eps key")
    eps_list = tuple(float(e) for e in _as_tuple(values.pop("eps")))

    T = None
    T_inverse = False
    if "t" in values:
        raw_T = values.pop("t")
        if isinstance(raw_T, str):
            if raw_T.replace(" ", "") != "1/eps":
                raise ConfigError(f"cannot parse final time {raw_T!r}")
            T_inverse = True
        else:
            T = float(raw_T)

    inverter = None
    if "inverter" in values:
        name = str(values.pop("inverter"))
        if name not in INVERTER_METHODS:
            raise ConfigError(f"unknown inverter {name!r}")
        inv_kw = {}
        for cfg_key in ("relax_dt_factor", "relax_steps", "newton_tol", "newton_max_iter", "fd_jacobian_step"):
            if cfg_key in values:
                inv_kw[cfg_key] = values.pop(cfg_key)
        inverter = InverterSpec(method=name, **inv_kw)
    else:
        for cfg_key in ("relax_dt_factor", "relax_steps", "newton_tol", "newton_max_iter", "fd_jacobian_step"):
            if cfg_key in values:
                raise ConfigError(f"{cfg_key} requires an explicit inverter key")

    overrides = tuple(
        (key[len("param.") :], float(values.pop(key)))
        for key in sorted(k for k in values if k.startswith("param."))
    )

    kw = dict(
        problem=problem,
        method=method,
        eps_list=eps_list,
        dt=float(values.pop("dt", 0.0)),
        T=T,
        T_inverse_eps=T_inverse,
        inverter=inverter,
        overrides=overrides,
    )
    if "k" in values:
        kw["k"] = int(values.pop("k"))
    if "l" in values:
        kw["L"] = int(values.pop("l"))
    if "p" in values:
        kw["P"] = int(values.pop("p"))
    if "m" in values:
        kw["m"] = int(values.pop("m"))
    if "dt_coupled" in values:
        kw["dt_coupled"] = float(values.pop("dt_coupled"))
    if "strategy" in values:
        kw["strategy"] = str(values.pop("strategy"))
    if "eta" in values:
        kw["eta"] = float(values.pop("eta"))
    if "layer_factor" in values:
        kw["layer_factor"] = float(values.pop("layer_factor"))
    if "layer_time_factor" in values:
        kw["layer_time_factor"] = float(values.pop("layer_time_factor"))
    if "warm_cache" in values:
        flag = values.pop("warm_cache")
        if not isinstance(flag, bool):
            raise ConfigError(f"warm_cache must be true or false, got {flag!r}")
        kw["warm_cache"] = flag
    if "checkpoints" in values:
        kw["checkpoints"] = tuple(float(c) for c in _as_tuple(values.pop("checkpoints")))
    if "x0" in values:
        kw["x0"] = tuple(float(v) for v in _as_tuple(values.pop("x0")))
    if "y0" in values:
        kw["y0"] = tuple(float(v) for v in _as_tuple(values.pop("y0")))
    if "label" in values:
        kw["label"] = str(values.pop("label"))
    if "seed" in values:
        kw["seed"] = int(values.pop("seed"))
    if method == "TwoGrid":
        if kw.get("L", 1) != 1:
            raise ConfigError("two-grid blocks cannot set L != 1")
        kw["L"] = 1
    leftovers = [k for k in values if not k.startswith("param.")]
    if leftovers:
        raise ConfigError(f"unused config keys: {', '.join(sorted(leftovers))}")
    return ExperimentSpec(**kw)


# --------------------------------------------------------- reference cache


def _reference_resolution(spec: ExperimentSpec, eps: float) -> tuple[float, int]:
    """Reference step (an exact divisor of T) and the sampling stride that
    lands samples on the macro grid."""
    T = spec.final_time(eps)
    target = min(spec.coupled_step(eps), 0.1 * eps)
    n = max(1, math.ceil(T / target - 1e-9))
    dt_ref = T / n
    if spec.method == "Reference" or spec.dt <= 0:
        stride = 1
    else:
        stride = max(1, round(spec.dt / dt_ref))
    return dt_ref, stride


def _cache_key(problem, overrides, eps, dt_ref, T, stride, x0, y0, keep_fast) -> str:
    payload = json.dumps(
        {
            "problem": problem,
            "overrides": sorted(overrides),
            "eps": float(eps).hex(),
            "dt_ref": float(dt_ref).hex(),
            "T": float(T).hex(),
            "stride": stride,
            "x0": [float(v).hex() for v in x0],
            "y0": [float(v).hex() for v in y0],
            "keep_fast": keep_fast,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def initial_state(spec: ExperimentSpec) -> tuple[np.ndarray, np.ndarray]:
    x0, y0 = default_initial_state(spec.problem, dict(spec.overrides))
    if spec.x0 is not None:
        x0 = np.array(spec.x0, dtype=float)
    if spec.y0 is not None:
        y0 = np.array(spec.y0, dtype=float)
    return x0, y0


def ensure_reference(spec: ExperimentSpec, eps: float, cache_dir: str | None) -> RunRecord:
    """Load the reference trajectory from the cache or compute and store
    it.  Writes go through a temp file and an atomic rename so concurrent
    sweeps can share one cache; unreadable entries are recomputed."""
    sys = make_problem(spec.problem, eps, dict(spec.overrides))
    x0, y0 = initial_state(spec)
    T = spec.final_time(eps)
    dt_ref, stride = _reference_resolution(spec, eps)
    keep_fast = sys.n_y <= 50

    path = None
    if cache_dir is not None:
        key = _cache_key(spec.problem, spec.overrides, eps, dt_ref, T, stride, x0, y0, keep_fast)
        os.makedirs(cache_dir, exist_ok=True)
        path = os.path.join(cache_dir, f"{key}.npz")
        if os.path.exists(path):
            try:
                with np.load(path) as data:
                    times = data["times"]
                    states = data["states"]
                    fast = data["fast"] if "fast" in data else None
                    evals = data["evals"]
                if len(times) != len(states) or times[-1] != T:
                    raise ValueError("cache entry shape mismatch")
                counters = Counters(f_evals=int(evals[0]), g_evals=int(evals[1]))
                return RunRecord(
                    times=times,
                    states=states,
                    counters=counters,
                    config={"method": "reference", "dt_ref": dt_ref, "T": T, "eps": eps},
                    fast_states=fast,
                )
            except Exception:
                pass  # fall through and recompute

    rec = solve_reference(sys, x0, y0, dt_ref, T, sample_stride=stride, keep_fast=keep_fast)
    if path is not None:
        payload = {
            "times": rec.times,
            "states": rec.states,
            "evals": np.array([rec.counters.f_evals, rec.counters.g_evals], dtype=np.int64),
        }
        if rec.fast_states is not None:
            payload["fast"] = rec.fast_states
        tmp = f"{path}.{os.getpid()}.tmp.npz"
        np.savez(tmp, **payload)
        os.replace(tmp, path)
    return rec


# ------------------------------------------------------------ single runs


def _solve_spec(spec: ExperimentSpec, eps: float) -> tuple[RunRecord, object]:
    """Layer plus slow solver for one spec at one eps; returns the record
    and the layer handoff."""
    sys = make_problem(spec.problem, eps, dict(spec.overrides))
    x0, y0 = initial_state(spec)
    T = spec.final_time(eps)
    cfg = MgtConfig(
        k=spec.k,
        L=spec.L,
        P=spec.P if spec.L >= 1 else 2,
        m=spec.m,
        dt=spec.dt,
        T=T,
        dt_coupled=min(spec.coupled_step(eps), spec.dt),
        strategy=spec.strategy,
        inverter=spec.inverter,
        eta=spec.eta,
        layer_factor=spec.layer_factor,
        layer_time_factor=spec.layer_time_factor,
    )
    evaluator = ManifoldEvaluator(
        sys=sys,
        inverter=spec.inverter if spec.inverter is not None else default_inverter(spec.problem),
        eta=spec.eta if spec.eta is not None else default_eta(spec.problem),
        max_order=spec.k + spec.L,
        use_warm_cache=spec.warm_cache,
    )
    layer = solve_initial_layer(sys, x0, y0, cfg, evaluator)
    if layer.t_exit >= T:
        raise ConfigError(
            f"initial layer consumed the whole run: t_exit={layer.t_exit}, T={T}"
        )
    if spec.L == 0:
        rec = solve_hmm(sys, spec.k, layer.x, spec.dt, layer.t_exit, T, evaluator)
    else:
        rec = solve_mgt(sys, cfg, layer.x, layer.t_exit, evaluator=evaluator)
    if layer.warning is not None:
        rec.warnings.insert(0, layer.warning)
    rec.config["t_layer"] = layer.t_exit
    return rec, layer


def run_row(spec: ExperimentSpec, eps: float, cache_dir: str | None) -> RowResult:
    """One (spec, eps) run: reference, layer, solver, final-time error."""
    t_wall = time.perf_counter()
    try:
        T = spec.final_time(eps)
        if spec.method == "Reference":
            rec = ensure_reference(spec, eps, cache_dir)
            dt_ref, _ = _reference_resolution(spec, eps)
            counters = rec.counters
            return RowResult(
                eps=eps,
                method=spec.method_label(),
                k=None,
                L=None,
                P=None,
                m=None,
                dt=dt_ref,
                T=T,
                error_l2=0.0,
                micro_calls=counters.micro_calls if counters else 0,
                f_evals=counters.f_evals if counters else 0,
                g_evals=counters.g_evals if counters else 0,
                wall_ms=1e3 * (time.perf_counter() - t_wall),
                record=rec,
            )
        ref = ensure_reference(spec, eps, cache_dir)
        rec, _layer = _solve_spec(spec, eps)
        error = float(np.linalg.norm(rec.final_state - ref.states[-1]))
        corrected = spec.L >= 1
        return RowResult(
            eps=eps,
            method=spec.method_label(),
            k=spec.k,
            L=spec.L,
            P=spec.P if corrected else None,
            m=spec.m if corrected else None,
            dt=spec.dt,
            T=T,
            error_l2=error,
            micro_calls=rec.counters.micro_calls,
            f_evals=rec.counters.f_evals,
            g_evals=rec.counters.g_evals,
            wall_ms=1e3 * (time.perf_counter() - t_wall),
            record=rec,
        )
    except ConfigError:
        raise
    except Exception as exc:  # a failed row is reported, not fatal
        return RowResult(
            eps=eps,
            method=spec.method_label(),
            k=spec.k,
            L=spec.L,
            P=spec.P,
            m=spec.m,
            dt=spec.dt,
            T=spec.final_time(eps),
            error_l2=float("nan"),
            micro_calls=0,
            f_evals=0,
            g_evals=0,
            wall_ms=1e3 * (time.perf_counter() - t_wall),
            ok=False,
            message=f"{type(exc).__name__}: {exc}",
        )


def _run_row_remote(args: tuple[ExperimentSpec, float, str | None]) -> RowResult:
    spec, eps, cache_dir = args
    row = run_row(spec, eps, cache_dir)
    row.record = None  # keep inter-process payloads small
    return row


def run(spec: ExperimentSpec, cache_dir: str | None = None, jobs: int = 1) -> list[RowResult]:
    """Run the experiment at every eps in its list, in order."""
    if jobs <= 1 or len(spec.eps_list) == 1:
        return [run_row(spec, eps, cache_dir) for eps in spec.eps_list]
    # References are filled serially first so workers only read the cache.
    for eps in spec.eps_list:
        ensure_reference(spec, eps, cache_dir)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_row_remote, [(spec, eps, cache_dir) for eps in spec.eps_list]))


def sup_norm_error(rec: RunRecord, ref: RunRecord) -> float:
    """Largest slow-state error over the run's sample times.

    The final-time l2 error is the CSV-reported metric; this is the
    whole-trajectory counterpart.  Reference samples are matched by time;
    samples without a matching reference time are skipped.
    """
    idx = np.searchsorted(ref.times, np.asarray(rec.times) - 1e-9)
    idx = np.clip(idx, 0, len(ref.times) - 1)
    aligned = np.abs(ref.times[idx] - rec.times) <= 1e-6 * np.maximum(1.0, np.abs(rec.times))
    if not np.any(aligned):
        return float("nan")
    diffs = np.linalg.norm(rec.states[aligned] - ref.states[idx[aligned]], axis=1)
    return float(np.max(diffs))


# ------------------------------------------------------------------ sweeps


def fit_slope(eps_values, errors) -> tuple[float, float, float]:
    """Least-squares slope/intercept of log10(error) against log10(eps),
    plus R^2."""
    eps_arr = np.asarray(eps_values, dtype=float)
    err_arr = np.asarray(errors, dtype=float)
    if len(eps_arr) < 3:
        raise ConfigError(f"slope fit needs at least 3 points, got {len(eps_arr)}")
    if np.any(err_arr <= 0.0) or not np.all(np.isfinite(err_arr)):
        raise ConfigError("slope fit needs finite positive errors")
    lx = np.log10(eps_arr)
    ly = np.log10(err_arr)
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r_squared


def sweep(spec: ExperimentSpec, cache_dir: str | None = None, jobs: int = 1) -> SweepResult:
    """Run over the eps list and fit the convergence slope; failed rows
    are kept in the output but excluded from the fit."""
    if len(spec.eps_list) < 3:
        raise ConfigError(f"a sweep needs at least 3 eps values, got {len(spec.eps_list)}")
    if any(b >= a for a, b in zip(spec.eps_list, spec.eps_list[1:])):
        raise ConfigError("sweep eps values must be strictly decreasing")
    rows = run(spec, cache_dir, jobs)
    good = [r for r in rows if r.ok and math.isfinite(r.error_l2) and r.error_l2 > 0.0]
    if len(good) >= 3:
        slope, intercept, r2 = fit_slope([r.eps for r in good], [r.error_l2 for r in good])
    else:
        slope = intercept = r2 = None
    return SweepResult(
        method=spec.method_label(), rows=rows, slope=slope, intercept=intercept, r_squared=r2
    )


# --------------------------------------------------------------- cost table


def compare_cost(
    specs: list[ExperimentSpec], cache_dir: str | None = None
) -> list[dict]:
    """Cumulative micro-calls and error per method at shared system-time
    checkpoints; all specs must target the same problem, eps, and T."""
    if not specs:
        raise ConfigError("compare_cost needs at least one spec")
    eps_values = {s.eps_list for s in specs}
    problems = {s.problem for s in specs}
    if len(problems) != 1 or len(eps_values) != 1 or len(specs[0].eps_list) != 1:
        raise ConfigError("cost comparison requires one shared problem and a single shared eps")
    eps = specs[0].eps_list[0]
    T = specs[0].final_time(eps)
    if any(s.final_time(eps) != T for s in specs):
        raise ConfigError("cost comparison requires one shared final time")
    checkpoints = specs[0].checkpoints or (T,)
    for cp in checkpoints:
        if not (0.0 < cp <= T + 1e-12):
            raise ConfigError(f"checkpoint {cp} outside (0, T={T}]")

    ref = ensure_reference(specs[0], eps, cache_dir)
    rows: list[dict] = []
    for spec in specs:
        rec, _layer = _solve_spec(spec, eps)
        for cp in checkpoints:
            idx = int(round((cp - rec.times[0]) / spec.dt))
            ref_idx = int(np.searchsorted(ref.times, cp - 1e-9))
            row = {
                "t": cp,
                "method": spec.method_label(),
                "k": spec.k,
                "L": spec.L,
            }
            in_run = 0 <= idx < len(rec.times) and abs(rec.times[idx] - cp) <= 1e-6
            near_ref = ref_idx < len(ref.times) and abs(ref.times[ref_idx] - cp) <= 1e-6
            if in_run and near_ref:
                row["micro_calls"] = int(rec.cost_trace[idx, 0])
                row["f_evals"] = int(rec.cost_trace[idx, 1])
                row["error_l2"] = float(
                    np.linalg.norm(rec.states[idx] - ref.states[ref_idx])
                )
            else:
                row["micro_calls"] = int(rec.cost_trace[-1, 0])
                row["f_evals"] = int(rec.cost_trace[-1, 1])
                row["error_l2"] = float("nan")
            rows.append(row)
    return rows


# --------------------------------------------------------------- drift demo


def drift_demo(
    eps: float,
    T: float,
    out_dir: str | None = None,
    dt: float = 1e-2,
    cache_dir: str | None = None,
) -> dict:
    """Reference plus the order-0/1/2 slow models on the drifting-spiral
    problem; returns final errors keyed by order and writes the
    trajectories for the two-panel figure."""
    if T == 0.0:
        return {"errors": {0: 0.0, 1: 0.0, 2: 0.0}, "csv_path": None}
    errors: dict[int, float] = {}
    traj_rows: list[tuple[float, str, float, float]] = []
    base = ExperimentSpec(
        problem="LinearDrift",
        method="HMM",
        eps_list=(eps,),
        dt=dt,
        T=T,
    )
    ref = ensure_reference(base, eps, cache_dir)
    for t, state in zip(ref.times, ref.states):
        traj_rows.append((float(t), "REF", float(state[0]), float(state[1])))
    for k in (0, 1, 2):
        rec, _layer = _solve_spec(replace(base, k=k), eps)
        errors[k] = float(np.linalg.norm(rec.final_state - ref.states[-1]))
        for t, state in zip(rec.times, rec.states):
            traj_rows.append((float(t), f"HMM{k}", float(state[0]), float(state[1])))

    csv_path = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        csv_path = os.path.join(out_dir, "drift_demo.csv")
        with open(csv_path, "w") as fh:
            fh.write(TRAJECTORY_HEADER + "\n")
            for t, label, x1, x2 in traj_rows:
                fh.write(f"{t!r},{label},{x1!r},{x2!r}\n")
    return {"errors": errors, "csv_path": csv_path}


# -------------------------------------------------------------- CSV output


def write_rows_csv(path: str, rows: list[RowResult]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(",".join(row.csv_values()) + "\n")


def write_cost_csv(path: str, rows: list[dict]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(COST_HEADER + "\n")
        for row in rows:
            err = row["error_l2"]
            err_text = "nan" if not math.isfinite(err) else repr(err)
            fh.write(
                f"{row['t']!r},{row['method']},{row['k']},{row['L']},"
                f"{row['micro_calls']},{row['f_evals']},{err_text}\n"
            )
