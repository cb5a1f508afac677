"""Polynomial extrapolation of sampled corrections.

Values recorded at a short window of past time nodes are extended forward
in time with the unique interpolating polynomial through those nodes,
evaluated in barycentric form.  A ring buffer (`StencilHistory`) maintains
the sliding window, and `lebesgue_constant` measures how much the
extrapolation can amplify sample errors over a target interval.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class StencilError(ValueError):
    """Raised for malformed stencils or invalid history operations."""


def _as_float_array(a, name: str) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(out)):
        raise StencilError(f"{name} must be finite, got {out!r}")
    return out


@dataclass(frozen=True)
class Stencil:
    """Strictly increasing time nodes paired with one value vector per node.

    `nodes` has shape (n,), `values` has shape (n, d).  The stencil is the
    data of a degree n-1 polynomial extrapolant in each of the d components.
    """

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        nodes = _as_float_array(self.nodes, "nodes")
        values = _as_float_array(self.values, "values")
        if nodes.ndim != 1 or nodes.size == 0:
            raise StencilError(f"nodes must be a non-empty 1-d array, got shape {nodes.shape}")
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2 or values.shape[0] != nodes.shape[0]:
            raise StencilError(
                f"values must have one row per node: nodes {nodes.shape}, values {values.shape}"
            )
        if nodes.size > 1 and not np.all(np.diff(nodes) > 0.0):
            raise StencilError(f"nodes must be strictly increasing, got {nodes!r}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @property
    def order(self) -> int:
        """Polynomial degree of the extrapolant (number of nodes minus one)."""
        return self.nodes.size - 1


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    """Weights w_j = 1 / prod_{i != j}(t_j - t_i), on rescaled nodes.

    Nodes are shifted and scaled to [0, 1] before the products so that
    narrow windows (spacing tau << 1) do not overflow.  The rescaling
    cancels in the barycentric ratio, so callers must apply the same
    transform to the evaluation point.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size
    if n == 1:
        return np.ones(1)
    span = nodes[-1] - nodes[0]
    s = (nodes - nodes[0]) / span
    w = np.empty(n)
    for j in range(n):
        diff = s[j] - s
        diff[j] = 1.0
        w[j] = 1.0 / np.prod(diff)
    return w


def lagrange_basis(nodes: np.ndarray, t: float) -> np.ndarray:
    """Values of the Lagrange basis polynomials for `nodes` at time `t`.

    The basis sums to one identically; evaluation at a node returns the
    corresponding unit vector exactly.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size
    if n == 1:
        return np.ones(1)
    span = nodes[-1] - nodes[0]
    s = (nodes - nodes[0]) / span
    ts = (t - nodes[0]) / span
    exact = np.nonzero(ts == s)[0]
    basis = np.zeros(n)
    if exact.size:
        basis[exact[0]] = 1.0
        return basis
    w = barycentric_weights(nodes)
    ratios = w / (ts - s)
    return ratios / np.sum(ratios)


def extrapolate(stencil: Stencil, t: float) -> np.ndarray:
    """Evaluate the stencil's interpolating polynomial at time `t`.

    Exact (up to roundoff) for data sampled from any polynomial of degree
    at most `stencil.order`; most useful slightly beyond the last node,
    where the window predicts the next value of a smooth signal.
    """
    basis = lagrange_basis(stencil.nodes, float(t))
    return basis @ stencil.values


def lebesgue_constant(nodes: np.ndarray, interval: tuple[float, float], n_grid: int = 1000) -> float:
    """Max of sum_j |l_j(t)| over an evaluation grid on `interval`.

    Bounds the worst-case amplification of per-node data errors by the
    extrapolant on that interval.  Uses a uniform grid of `n_grid` points,
    endpoints included.
    """
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise StencilError(f"interval must satisfy a < b, got ({a}, {b})")
    if n_grid < 2:
        raise StencilError(f"n_grid must be at least 2, got {n_grid}")
    grid = np.linspace(a, b, n_grid)
    worst = 0.0
    for t in grid:
        worst = max(worst, float(np.sum(np.abs(lagrange_basis(nodes, t)))))
    return worst


@dataclass
class StencilHistory:
    """Ring buffer of the most recent `capacity` (time, value) samples.

    `push` appends a sample with a strictly larger time than the previous
    one, evicting the oldest sample once full.  `as_stencil` snapshots the
    current window for extrapolation.
    """

    capacity: int
    _times: list[float] = field(default_factory=list, repr=False)
    _values: list[np.ndarray] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise StencilError(f"capacity must be at least 1, got {self.capacity}")

    def __len__(self) -> int:
        return len(self._times)

    @property
    def is_full(self) -> bool:
        return len(self._times) == self.capacity

    def push(self, t: float, value: np.ndarray) -> None:
        t = float(t)
        if not np.isfinite(t):
            raise StencilError(f"sample time must be finite, got {t}")
        if self._times and t <= self._times[-1]:
            raise StencilError(
                f"sample times must be strictly increasing: got {t} after {self._times[-1]}"
            )
        value = _as_float_array(value, "value").reshape(-1).copy()
        if self._values and value.shape != self._values[-1].shape:
            raise StencilError(
                f"value shape changed from {self._values[-1].shape} to {value.shape}"
            )
        self._times.append(t)
        self._values.append(value)
        if len(self._times) > self.capacity:
            self._times.pop(0)
            self._values.pop(0)

    def as_stencil(self) -> Stencil:
        if not self._times:
            raise StencilError("history is empty, nothing to extrapolate")
        return Stencil(np.array(self._times), np.vstack(self._values))

    def clear(self) -> None:
        self._times.clear()
        self._values.clear()
