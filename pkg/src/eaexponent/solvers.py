"""Generic optimizers: entropic mirror descent on density matrices and
golden-section search on an interval."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import operators as ops


@dataclass
class MirrorResult:
    value: float
    point: np.ndarray
    gradient: np.ndarray
    iterations: int
    stationarity: float
    converged: bool
    step: float
    history: list = field(default_factory=list)


def stationarity(X: np.ndarray, G: np.ndarray) -> float:
    """Frobenius norm of ``X^(1/2) (G - tr(XG) I) X^(1/2)``.

    Zero exactly at a first-order optimum of a smooth function over density
    matrices (KKT conditions with an interior multiplier), and it vanishes on
    the kernel of ``X``, so boundary optima are certified too.
    """
    w, V = ops.eigh(X)
    root = ops.from_eig(np.sqrt(np.clip(w, 0, None)), V)
    Gc = G - np.trace(X @ G).real * np.eye(len(X))
    return float(np.linalg.norm(root @ Gc @ root))


def _gibbs(log_x: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Normalized ``exp(L)`` with its natural log and the log partition."""
    w, V = ops.eigh(log_x)
    m = w.max()
    e = np.exp(w - m)
    z = e.sum()
    X = ops.from_eig(e / z, V)
    log_norm = ops.from_eig(w - m - math.log(z), V)
    return X, log_norm, m + math.log(z)


def mirror_descent(fun: Callable[[np.ndarray], tuple[float, np.ndarray]], X0: np.ndarray,
                   max_iter: int = 5000, tol: float = 1e-9, step: float = 1.0,
                   min_step: float = 1e-20, record: bool = False, patience: int = 40
                   ) -> MirrorResult:
    """Minimize a smooth convex ``f`` over density matrices.

    ``fun(X)`` returns ``(f(X), G)`` with ``G`` the Hermitian gradient.  Each
    step is ``X <- exp(log X - eta G) / Z``.  A step is accepted when
    ``f(Y) <= f(X) + <G, Y - X> + KL(Y||X)/eta`` (KL in nats), after which
    ``eta`` grows by 1.5; otherwise ``eta`` is halved.  Stops when
    :func:`stationarity` drops below ``tol``, or when ``patience`` accepted
    steps in a row fail to lower ``f`` by more than rounding noise (the result
    then reports ``converged`` according to the stationarity it reached).
    ``X0`` must be full rank.
    """
    X = ops.herm(np.asarray(X0, dtype=complex))
    w, V = ops.eigh(X)
    log_x = ops.from_eig(np.log(np.clip(w, 1e-300, None)), V)
    f, G = fun(X)
    eta = step
    history = []
    stat = stationarity(X, G)
    it = 0
    stalled = 0
    while it < max_iter and stat > tol and stalled < patience:
        it += 1
        while True:
            Y, log_y, log_z = _gibbs(log_x - eta * G)
            fy, Gy = fun(Y)
            # KL(Y||X) = -eta <G, Y> - log Z, so the bound collapses to this
            bound = f - np.vdot(G, X).real - log_z / eta
            if fy <= bound + 1e-15 * (1.0 + abs(f)):
                break
            eta *= 0.5
            if eta < min_step:
                return MirrorResult(f, X, G, it, stat, False, eta, history)
        stalled = stalled + 1 if f - fy <= 1e-14 * (1.0 + abs(f)) else 0
        X, log_x, f, G = Y, log_y, fy, Gy
        eta *= 1.5
        stat = stationarity(X, G)
        if record:
            history.append((f, stat))
    return MirrorResult(f, X, G, it, stat, stat <= tol, eta, history)


@dataclass
class GoldenResult:
    x: float
    value: float
    evaluations: int
    points: list


INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-6, max_iter: int = 200) -> GoldenResult:
    """Maximize a unimodal ``f`` on ``[a, b]``; endpoints are always evaluated.

    Returns the best point seen, which may be an endpoint when the maximum
    sits on the boundary.
    """
    cache: dict[float, float] = {}

    def F(x):
        if x not in cache:
            cache[x] = float(f(x))
        return cache[x]

    lo, hi = a, b
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = F(c), F(d)
    it = 0
    while hi - lo > tol and it < max_iter:
        it += 1
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = F(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = F(d)
    F(a)
    F(b)
    x_best = max(cache, key=lambda x: (cache[x], -abs(x - 0.5 * (a + b))))
    pts = sorted(cache.items())
    return GoldenResult(x_best, cache[x_best], len(cache), pts)
