"""Quantum Rényi divergences and the entropic quantities built from them.

Every divergence returns a :class:`DivergenceValue`, a ``float`` that also
records whether an infinite value came from a support condition.  Values are
in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import operators as ops
from .errors import ConvergenceError, InvariantError, ShapeError

FINITE = "finite"
INFINITE_BY_SUPPORT = "infinite_by_support"

SUPPORT_ATOL = 1e-9
# log2(1/eps) for the regularized limit: 1e-4, then squared each step
LOG_EPSILON_SCHEDULE = tuple(np.log2(1e4) * 2.0 ** j for j in range(14))
EXTRAPOLATION_TOL = 1e-6


class DivergenceValue(float):
    """Extended-real divergence value in bits.

    ``support`` is ``"finite"`` or ``"infinite_by_support"``; the value is
    ``+inf`` exactly in the second case.  ``diagnostics`` carries solver or
    extrapolation details when there are any.
    """

    def __new__(cls, value, support: str = FINITE, diagnostics: dict | None = None):
        if support == INFINITE_BY_SUPPORT:
            value = math.inf
        elif not math.isfinite(value):
            raise ValueError("finite divergence value expected")
        obj = super().__new__(cls, value)
        obj.support = support
        obj.diagnostics = diagnostics or {}
        return obj

    @classmethod
    def infinite(cls) -> "DivergenceValue":
        return cls(math.inf, INFINITE_BY_SUPPORT)

    @property
    def is_finite(self) -> bool:
        return self.support == FINITE

    def __repr__(self):
        if not self.is_finite:
            return "DivergenceValue(+inf, infinite_by_support)"
        return f"DivergenceValue({float(self)!r})"


@dataclass(frozen=True)
class RenyiOrder:
    """Rényi order ``alpha`` with ``lam = (alpha - 1) / alpha``.

    ``limit=True`` denotes the ``alpha -> 1`` limit (relative-entropy case).
    """

    alpha: float = 1.0
    limit: bool = False

    def __post_init__(self):
        a = float(self.alpha)
        if self.limit:
            object.__setattr__(self, "alpha", 1.0)
            return
        if not a > 0 or a == 1.0 or not math.isfinite(a):
            raise InvariantError(f"Renyi order must lie in (0,1) or (1,inf), got {a!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def lam(self) -> float:
        return 0.0 if self.limit else (self.alpha - 1.0) / self.alpha

    @classmethod
    def from_lambda(cls, lam: float) -> "RenyiOrder":
        if lam == 0.0:
            return cls(limit=True)
        if not lam < 1.0:
            raise InvariantError("lambda must be below 1")
        return cls(1.0 / (1.0 - lam))

    @classmethod
    def one(cls) -> "RenyiOrder":
        return cls(limit=True)


def as_order(alpha) -> RenyiOrder:
    if isinstance(alpha, RenyiOrder):
        return alpha
    if float(alpha) == 1.0:
        return RenyiOrder.one()
    return RenyiOrder(float(alpha))


# -- support bookkeeping -----------------------------------------------------

def support_basis(X: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the support of a PSD operator."""
    w, V = ops.eigh(X)
    return V[:, w > ops.support_threshold(w)]


def support_projector(X: np.ndarray) -> np.ndarray:
    U = support_basis(X)
    return U @ U.conj().T


def support_contained(rho: np.ndarray, sigma: np.ndarray) -> bool:
    """``supp(rho) ⊆ supp(sigma)`` via ``||(I - P) rho (I - P)|| <= 1e-9``."""
    P = support_projector(sigma)
    Q = np.eye(rho.shape[0]) - P
    return np.linalg.norm(Q @ rho @ Q, 2) <= SUPPORT_ATOL


def supports_orthogonal(rho: np.ndarray, sigma: np.ndarray) -> bool:
    P = support_projector(sigma)
    return np.linalg.norm(P @ rho @ P, 2) <= SUPPORT_ATOL


def support_intersection_dim(rho: np.ndarray, sigma: np.ndarray) -> int:
    """Dimension of ``supp(rho) ∩ supp(sigma)`` from principal angles."""
    U, W = support_basis(rho), support_basis(sigma)
    if U.shape[1] == 0 or W.shape[1] == 0:
        return 0
    s = np.linalg.svd(U.conj().T @ W, compute_uv=False)
    return int(np.sum(s >= 1.0 - SUPPORT_ATOL))


def _check_pair(rho, sigma):
    rho = ops.check_state(np.asarray(rho))
    sigma = ops.check_psd(np.asarray(sigma))
    if rho.shape != sigma.shape:
        raise ShapeError(f"operands differ in size: {rho.shape} vs {sigma.shape}")
    return rho, sigma


def log2_sum_exp2(h: np.ndarray) -> float:
    m = np.max(h)
    return float(m + np.log2(np.sum(np.exp2(h - m))))


# -- divergences ---------------------------------------------------------------

def relative_entropy(rho, sigma) -> DivergenceValue:
    """Umegaki relative entropy ``tr rho (log rho - log sigma)`` in bits."""
    rho, sigma = _check_pair(rho, sigma)
    if not support_contained(rho, sigma):
        return DivergenceValue.infinite()
    value = -von_neumann_entropy(rho) - np.trace(rho @ ops.psd_log2(sigma)).real
    return DivergenceValue(float(value))


def sandwiched_log_trace(Y_eigs: np.ndarray, alpha: float) -> float:
    """``log tr Y^alpha`` from the spectrum of ``Y``, stable for large ``alpha``."""
    lam = np.clip(Y_eigs, 0.0, None)
    top = lam.max()
    if top <= 0:
        return -math.inf
    # eigenvalues below the support threshold are rounding noise; for alpha < 1
    # they would otherwise contribute their square root or similar
    lam = lam[lam > ops.support_threshold(lam)]
    return float(alpha * np.log2(top) + np.log2(np.sum((lam / top) ** alpha)))


def sandwiched_divergence(rho, sigma, alpha) -> DivergenceValue:
    """``(1/(alpha-1)) log tr (sigma^s rho sigma^s)^alpha`` with ``s = (1-alpha)/(2 alpha)``."""
    order = as_order(alpha)
    if order.limit:
        return relative_entropy(rho, sigma)
    a = order.alpha
    rho, sigma = _check_pair(rho, sigma)
    if a > 1 and not support_contained(rho, sigma):
        return DivergenceValue.infinite()
    if a < 1 and supports_orthogonal(rho, sigma):
        return DivergenceValue.infinite()
    S = ops.psd_power(sigma, (1 - a) / (2 * a))
    y = np.linalg.eigvalsh(ops.herm(S @ rho @ S))
    logq = sandwiched_log_trace(y, a)
    if not math.isfinite(logq):
        return DivergenceValue.infinite()
    return DivergenceValue(logq / (a - 1))


def _neville_at_zero(u: Sequence[float], f: Sequence[float]) -> np.ndarray:
    """Neville table for extrapolation to ``u = 0``; row ``i`` uses points ``0..i``."""
    n = len(u)
    T = np.zeros((n, n))
    T[:, 0] = f
    for k in range(1, n):
        for i in range(k, n):
            T[i, k] = (u[i] * T[i - 1, k - 1] - u[i - k] * T[i, k - 1]) / (u[i] - u[i - k])
    return T


def _log_euclidean_regularized(log_r, log_s, kr, ks, a, log_inv_eps, keep):
    H = a * (log_r - log_inv_eps * kr) + (1 - a) * (log_s - log_inv_eps * ks)
    h = np.linalg.eigvalsh(ops.herm(H))[::-1][:keep]
    return log2_sum_exp2(h) / (a - 1)


def support_intersection_basis(rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ``supp(rho) ∩ supp(sigma)`` (principal angles)."""
    U, W = support_basis(rho), support_basis(sigma)
    if U.shape[1] == 0 or W.shape[1] == 0:
        return np.zeros((rho.shape[0], 0), dtype=complex)
    L, s, _ = np.linalg.svd(U.conj().T @ W)
    return U @ L[:, :int(np.sum(s >= 1.0 - SUPPORT_ATOL))]


def _infinite_by_support(rho, sigma, a) -> bool:
    if a > 1:
        return not support_contained(rho, sigma)
    return support_intersection_dim(rho, sigma) == 0


def log_euclidean_divergence(rho, sigma, alpha) -> DivergenceValue:
    """``(1/(alpha-1)) log tr 2^(alpha log rho + (1-alpha) log sigma)``.

    Singular pairs take the ``eps -> 0`` limit of the trace with ``rho + eps I``
    and ``sigma + eps I``.  That limit equals the same trace with both
    logarithms compressed onto ``P = supp(rho) ∩ supp(sigma)``:
    ``tr 2^(alpha P log rho P + (1-alpha) P log sigma P)`` on the range of
    ``P``, which is what is evaluated.  :func:`log_euclidean_extrapolated`
    computes the limit directly from regularized traces as a cross-check.
    """
    order = as_order(alpha)
    if order.limit:
        return relative_entropy(rho, sigma)
    a = order.alpha
    rho, sigma = _check_pair(rho, sigma)
    if _infinite_by_support(rho, sigma, a):
        return DivergenceValue.infinite()
    P = support_intersection_basis(rho, sigma)
    H = a * ops.psd_log2(rho) + (1 - a) * ops.psd_log2(sigma)
    h = np.linalg.eigvalsh(ops.herm(P.conj().T @ H @ P))
    return DivergenceValue(log2_sum_exp2(h) / (a - 1))


def log_euclidean_extrapolated(rho, sigma, alpha, tol: float = EXTRAPOLATION_TOL
                               ) -> DivergenceValue:
    """The ``eps -> 0`` limit of the regularized log-Euclidean trace, computed
    by extrapolation rather than by compression.

    The pair is restricted to ``supp(rho + sigma)``, where the complement
    decouples exactly.  Each kernel is filled with ``eps`` (the support part is
    left untouched, which changes nothing in the limit but removes the O(eps)
    bias) for ``eps = 1e-4, 1e-8, 1e-16, ...``; only ``log eps`` enters, so
    tiny values are harmless.  Only the eigenvalues of the exponent that stay
    bounded as ``eps -> 0`` are summed.  The exponent is affine in
    ``1/u = log2(1/eps)``, so those eigenvalues are analytic in ``u`` and a
    Neville table extrapolates them to ``u = 0``.  Points are added until the
    last two extrapolants differ by less than ``tol``.
    """
    a = as_order(alpha).alpha
    rho, sigma = _check_pair(rho, sigma)
    if _infinite_by_support(rho, sigma, a):
        return DivergenceValue.infinite()
    k = support_intersection_dim(rho, sigma)
    U = support_basis(rho + sigma)
    r = ops.herm(U.conj().T @ rho @ U)
    s = ops.herm(U.conj().T @ sigma @ U)
    eye = np.eye(len(r))
    kr, ks = eye - support_projector(r), eye - support_projector(s)
    log_r, log_s = ops.psd_log2(r), ops.psd_log2(s)
    L = np.array(LOG_EPSILON_SCHEDULE)
    u = 1.0 / L
    seq, best, change = [], math.nan, math.inf
    for i, li in enumerate(L):
        seq.append(_log_euclidean_regularized(log_r, log_s, kr, ks, a, li, k))
        if i >= 2:
            T = _neville_at_zero(u[:i + 1], seq)
            best, change = T[i, i], abs(T[i, i] - T[i, i - 1])
            if change < tol:
                break
    details = {"log2_inverse_epsilons": L[:len(seq)].tolist(), "sequence": list(seq),
               "change": change}
    if not (math.isfinite(best) and change < tol):
        raise ConvergenceError("regularized log-Euclidean trace did not extrapolate",
                               best=best, details=details)
    return DivergenceValue(float(best), diagnostics=details)


def log_euclidean_variational(rho, sigma, alpha, iterations: int = 4000,
                              tol: float = 1e-12) -> DivergenceValue:
    """Variational form of the log-Euclidean divergence.

    Maximizes ``s(a) [D(tau||sigma) - a/(a-1) D(tau||rho)]`` over states
    ``tau`` supported in ``supp(rho)`` by entropic mirror ascent, then
    multiplies by ``s(a)`` (``+1`` for ``a > 1``, ``-1`` below).  Meant as an
    independent cross-check of :func:`log_euclidean_divergence` on full-rank
    pairs; it never forms the Gibbs maximizer explicitly.
    """
    from .solvers import mirror_descent

    a = as_order(alpha).alpha
    rho, sigma = _check_pair(rho, sigma)
    U = support_basis(rho)
    r = ops.herm(U.conj().T @ rho @ U)
    if not support_contained(rho, sigma):
        if a > 1:
            return DivergenceValue.infinite()
        raise NotImplementedError("variational form needs supp(rho) inside supp(sigma)")
    log_r = ops.psd_log2(r)
    log_s = ops.herm(U.conj().T @ ops.psd_log2(sigma) @ U)
    sign = 1.0 if a > 1 else -1.0
    c = a / (a - 1)

    # D(t||s) - c D(t||r) = (c - 1) H(t) ... written with H(t) = -tr t log t
    def objective(t):
        w, V = ops.eigh(t)
        w = np.clip(w, 1e-300, None)
        log_t = ops.from_eig(np.log2(w), V)
        val = np.trace(t @ ((1 - c) * log_t - log_s + c * log_r)).real
        grad = (1 - c) * (log_t + np.eye(len(t)) / ops.LN2) - log_s + c * log_r
        return -sign * val, -sign * grad

    res = mirror_descent(objective, np.eye(len(r)) / len(r), max_iter=iterations, tol=tol)
    return DivergenceValue(float(-sign * res.value), diagnostics={"iterations": res.iterations})


# -- entropic quantities ------------------------------------------------------

def von_neumann_entropy(rho) -> float:
    w = np.linalg.eigvalsh(ops.herm(np.asarray(rho)))
    w = w[w > 1e-300]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def mutual_information(rho_ab, dims: Sequence[int]) -> float:
    """``D(rho_AB || rho_A ⊗ rho_B)`` for a bipartite state with ``dims = [dA, dB]``."""
    rho_ab = ops.check_state(np.asarray(rho_ab))
    if len(dims) != 2:
        raise ShapeError("mutual information needs exactly two subsystems")
    ra = ops.partial_trace(rho_ab, dims, [0])
    rb = ops.partial_trace(rho_ab, dims, [1])
    return float(max(0.0, relative_entropy(rho_ab, np.kron(ra, rb))))


@dataclass
class StateEnsemble:
    """Finite ensemble of ``(weight, state)`` pairs sharing one shape.

    States may be density matrices or pure-state vectors; ``dims`` lists the
    subsystem dimensions when the states are composite.
    """

    weights: np.ndarray
    states: list
    dims: list | None = None
    labels: list | None = field(default=None)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.states) or len(w) == 0:
            raise ShapeError("weights and states must be nonempty lists of equal length")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            raise InvariantError("ensemble weights must be a probability vector")
        states = [np.asarray(s, dtype=complex) for s in self.states]
        if len({s.shape for s in states}) != 1:
            raise ShapeError("ensemble states must share one shape")
        self.weights = w
        self.states = states

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(zip(self.weights, self.states))

    def density_matrices(self) -> list[np.ndarray]:
        return [ops.projector(s) if s.ndim == 1 else s for s in self.states]


def holevo_information(ens: StateEnsemble) -> float:
    """``sum_x p_x D(rho_x || sum_x p_x rho_x)``."""
    rhos = ens.density_matrices()
    avg = sum(p * r for p, r in zip(ens.weights, rhos))
    total = 0.0
    for p, r in zip(ens.weights, rhos):
        if p > 0:
            total += p * relative_entropy(r, avg)
    return float(max(0.0, total))


def fidelity(rho, sigma) -> float:
    """``|| sqrt(rho) sqrt(sigma) ||_1``."""
    rho, sigma = _check_pair(rho, sigma)
    ops.check_state(sigma)
    a = ops.spectral_apply(rho, np.sqrt)
    b = ops.spectral_apply(sigma, np.sqrt)
    return float(min(1.0, np.sum(np.linalg.svd(a @ b, compute_uv=False))))
