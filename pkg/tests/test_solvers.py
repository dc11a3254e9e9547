import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eaexponent import operators as ops
from eaexponent.solvers import golden_section_max, mirror_descent, stationarity


def free_energy(H):
    """``tr X ln X + tr X H`` (nats) and its gradient; minimized by a Gibbs state."""
    def fun(X):
        w, V = ops.eigh(X)
        w = np.clip(w, 1e-300, None)
        log_x = ops.from_eig(np.log(w), V)
        return float(np.sum(w * np.log(w)) + np.trace(X @ H).real), ops.herm(log_x + np.eye(len(X)) + H)
    return fun


def gibbs(H):
    w, V = np.linalg.eigh(H)
    e = np.exp(-(w - w.min()))
    return ops.from_eig(e / e.sum(), V), -(math.log(e.sum()) - w.min())


@pytest.mark.parametrize("seed", range(3))
def test_mirror_descent_finds_gibbs_state(seed):
    rng = np.random.default_rng(seed)
    d = 4
    H = ops.herm(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    res = mirror_descent(free_energy(H), np.eye(d) / d, tol=1e-10)
    X, value = gibbs(H)
    assert res.converged
    assert res.value == pytest.approx(value, abs=1e-10)
    assert np.allclose(res.point, X, atol=1e-8)


def test_mirror_descent_linear_objective_goes_to_ground_state():
    H = np.diag([0.3, -1.0, 2.0])
    res = mirror_descent(lambda X: (np.trace(X @ H).real, H), np.eye(3) / 3, tol=1e-6,
                         max_iter=20000)
    assert res.value == pytest.approx(-1.0, abs=1e-5)
    assert res.point[1, 1].real == pytest.approx(1.0, abs=1e-5)


def test_mirror_descent_records_monotone_history():
    H = np.diag([1.0, 0.0])
    res = mirror_descent(free_energy(H), np.eye(2) / 2, record=True)
    values = [f for f, _ in res.history]
    assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))


def test_stationarity_vanishes_at_boundary_optimum():
    X = np.diag([1.0, 0.0])
    G = np.diag([0.0, 5.0])
    assert stationarity(X, G) == pytest.approx(0.0)
    assert stationarity(np.eye(2) / 2, G) > 0


def test_golden_section_interior_and_boundary():
    g = golden_section_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, tol=1e-8)
    assert g.x == pytest.approx(0.3, abs=1e-7)
    g = golden_section_max(lambda x: x, 0.1, 0.9)
    assert g.x == 0.9 and g.value == 0.9
    g = golden_section_max(lambda x: -x, 0.1, 0.9)
    assert g.x == 0.1


@given(st.floats(-2, 2), st.floats(0.05, 5))
def test_golden_section_concave_quadratics(c, k):
    g = golden_section_max(lambda x: -k * (x - c) ** 2, -3.0, 3.0, tol=1e-9)
    assert g.x == pytest.approx(c, abs=1e-6)
