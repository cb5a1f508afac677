"""Tests for polynomial extrapolation stencils.

Expected values come from a brute-force product-form Lagrange evaluator
written here, independent of the barycentric implementation under test.
"""
from __future__ import annotations

import numpy as np
import pytest

from fastslow.extrap import (
    Stencil,
    StencilError,
    StencilHistory,
    extrapolate,
    lagrange_basis,
    lebesgue_constant,
)


def lagrange_product_form(nodes, values, t):
    """Brute-force reference: sum_j values[j] * prod_{i!=j} (t-t_i)/(t_j-t_i)."""
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    total = np.zeros_like(values[0])
    for j in range(nodes.size):
        basis = 1.0
        for i in range(nodes.size):
            if i != j:
                basis *= (t - nodes[i]) / (nodes[j] - nodes[i])
        total = total + basis * values[j]
    return total


def test_single_node_stencil_is_constant():
    st = Stencil(np.array([0.5]), np.array([[2.0, -3.0]]))
    out = extrapolate(st, 3.7)
    assert out.shape == (2,)
    assert np.array_equal(out, np.array([2.0, -3.0]))


def test_two_node_stencil_extends_linearly():
    st = Stencil(np.array([0.0, 1.0]), np.array([[0.0], [1.0]]))
    assert extrapolate(st, 5.0)[0] == pytest.approx(5.0, abs=1e-13)
    assert extrapolate(st, -2.0)[0] == pytest.approx(-2.0, abs=1e-13)


def test_cubic_sample_example_matches_product_form_and_error_bound():
    # h(t) = t^3 sampled at 0, 1, 2; the quadratic through (0,0),(1,1),(2,8)
    # is p(t) = 3t^2 - 2t, so p(3) = 21 and the error vs h(3) = 27 is 6.
    nodes = np.array([0.0, 1.0, 2.0])
    values = np.array([[0.0], [1.0], [8.0]])
    st = Stencil(nodes, values)
    got = extrapolate(st, 3.0)[0]
    oracle = lagrange_product_form(nodes, values, 3.0)[0]
    assert got == pytest.approx(oracle, abs=1e-12)
    assert got == pytest.approx(21.0, abs=1e-12)
    error = abs(27.0 - got)
    # |h(t) - p(t)| <= (1/m!) |prod (t - t_i)| max|h^(m)| with m = 3 nodes,
    # h''' = 6 constant, so the bound is attained exactly.
    phi = (3.0 - 0.0) * (3.0 - 1.0) * (3.0 - 2.0)
    bound = phi / 6.0 * 6.0
    assert error <= bound * (1.0 + 1e-12)
    assert error == pytest.approx(bound, rel=1e-12)


def test_matches_product_form_on_random_stencils():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(1, 7))
        nodes = np.cumsum(rng.uniform(0.05, 1.0, size=n)) + rng.uniform(-3, 3)
        values = rng.normal(size=(n, 3))
        st = Stencil(nodes, values)
        t = nodes[-1] + rng.uniform(0.0, 2.0)
        got = extrapolate(st, t)
        want = lagrange_product_form(nodes, values, t)
        assert np.max(np.abs(got - want)) <= 1e-9 * (1.0 + np.max(np.abs(want)))


def test_basis_is_partition_of_unity():
    # Random equispaced windows, the shape every solver stencil has, with
    # evaluation up to one spacing before or past the window.  Wildly
    # non-uniform nodes would push the Lebesgue function so high that
    # roundoff alone exceeds any fixed tolerance.
    rng = np.random.default_rng(1)
    for _ in range(200):
        n = int(rng.integers(1, 8))
        tau = float(rng.uniform(1e-3, 0.5))
        nodes = float(rng.uniform(-2.0, 2.0)) + tau * np.arange(n)
        t = nodes[0] + tau * float(rng.uniform(-1.0, n))
        basis = lagrange_basis(nodes, t)
        assert abs(np.sum(basis) - 1.0) <= 1e-12


def test_reproduces_polynomials_up_to_stencil_degree():
    rng = np.random.default_rng(2)
    for m in range(5):
        for _ in range(20):
            coeffs = rng.normal(size=m + 1)
            tau = float(rng.uniform(0.01, 0.5))
            t0 = float(rng.uniform(-1.0, 1.0))
            nodes = t0 + tau * np.arange(m + 1)
            values = np.polyval(coeffs, nodes).reshape(-1, 1)
            st = Stencil(nodes, values)
            t = nodes[-1] + rng.uniform(0.0, tau)
            want = float(np.polyval(coeffs, t))
            got = extrapolate(st, t)[0]
            assert abs(got - want) <= 1e-10 * (1.0 + abs(want))


def test_evaluation_at_node_returns_sample_exactly():
    nodes = np.array([0.1, 0.2, 0.3, 0.4])
    values = np.arange(8.0).reshape(4, 2)
    st = Stencil(nodes, values)
    for j, t in enumerate(nodes):
        assert np.array_equal(extrapolate(st, t), values[j])


def test_smooth_signal_error_scales_with_window_size():
    # Extrapolating sin over one step past an equispaced window of m+1
    # nodes is accurate to tau^(m+1) * max|sin^(m+1)| = tau^(m+1).
    for m in (1, 2, 3):
        for tau in (0.1, 0.05, 0.025):
            nodes = 0.3 + tau * np.arange(m + 1)
            st = Stencil(nodes, np.sin(nodes).reshape(-1, 1))
            targets = nodes[-1] + tau * np.linspace(0.0, 1.0, 50)
            worst = max(abs(extrapolate(st, t)[0] - np.sin(t)) for t in targets)
            assert worst <= tau ** (m + 1)


def test_lebesgue_constant_basics():
    assert lebesgue_constant(np.array([0.7]), (0.0, 5.0)) == pytest.approx(1.0)
    # Inside the node interval of a two-point stencil |1-t| + |t| = 1.
    assert lebesgue_constant(np.array([0.0, 1.0]), (0.0, 1.0)) == pytest.approx(1.0)
    # Extrapolating one step past the window: conservative envelope 2^m (m+1).
    for m in range(1, 5):
        nodes = np.arange(m + 1, dtype=float)
        lam = lebesgue_constant(nodes, (float(m), float(m + 1)))
        assert 1.0 <= lam <= 2.0**m * (m + 1)


def test_lebesgue_constant_grows_with_extrapolation_distance():
    nodes = np.arange(4, dtype=float)
    near = lebesgue_constant(nodes, (3.0, 3.5))
    far = lebesgue_constant(nodes, (3.0, 4.0))
    assert far >= near


def test_stencil_validation():
    with pytest.raises(StencilError):
        Stencil(np.array([0.0, 0.0]), np.zeros((2, 1)))
    with pytest.raises(StencilError):
        Stencil(np.array([1.0, 0.5]), np.zeros((2, 1)))
    with pytest.raises(StencilError):
        Stencil(np.array([0.0, 1.0]), np.zeros((3, 1)))
    with pytest.raises(StencilError):
        Stencil(np.array([0.0, np.nan]), np.zeros((2, 1)))
    with pytest.raises(StencilError):
        Stencil(np.array([]), np.zeros((0, 1)))


def test_history_keeps_only_newest_samples():
    hist = StencilHistory(capacity=2)
    assert len(hist) == 0
    hist.push(0.0, np.array([1.0]))
    assert len(hist) == 1 and not hist.is_full
    hist.push(1.0, np.array([2.0]))
    hist.push(2.0, np.array([3.0]))
    assert hist.is_full
    st = hist.as_stencil()
    assert np.array_equal(st.nodes, np.array([1.0, 2.0]))
    assert np.array_equal(st.values[:, 0], np.array([2.0, 3.0]))


def test_history_rejects_non_increasing_times():
    hist = StencilHistory(capacity=3)
    hist.push(0.0, np.array([0.0]))
    with pytest.raises(StencilError):
        hist.push(0.0, np.array([1.0]))
    with pytest.raises(StencilError):
        hist.push(-1.0, np.array([1.0]))


def test_history_snapshot_is_independent_of_later_pushes():
    hist = StencilHistory(capacity=2)
    v = np.array([1.0])
    hist.push(0.0, v)
    st = hist.as_stencil()
    v[0] = 99.0
    hist.push(1.0, np.array([2.0]))
    assert st.values[0, 0] == 1.0
    assert len(st.nodes) == 1


def test_history_misuse_errors():
    with pytest.raises(StencilError):
        StencilHistory(capacity=0)
    hist = StencilHistory(capacity=2)
    with pytest.raises(StencilError):
        hist.as_stencil()
    hist.push(0.0, np.array([1.0, 2.0]))
    with pytest.raises(StencilError):
        hist.push(1.0, np.array([1.0]))
