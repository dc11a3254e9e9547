"""Optimization layers on top of the divergences.

* Rényi mutual information: minimization over the output marginal ``sigma_B``.
* Channel Rényi information and the entanglement-assisted capacity:
  maximization over the input state through its canonical purification.
* Strong converse exponents: a golden-section sup over ``lambda``.
* Log-Euclidean channel information and the exponent candidate ``F`` in its
  sup form and its variational form, plus the ``F1``/``F2`` split.

All gradients are analytic (Daleckii-Krein divided differences) and are
checked against central finite differences in the tests.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import operators as ops
from .divergence import (StateEnsemble, as_order, log2_sum_exp2, log_euclidean_divergence,
                         support_basis, support_projector, von_neumann_entropy)
from .errors import ConvergenceError, InvariantError, ShapeError
from .solvers import golden_section_max, mirror_descent

LN2 = ops.LN2
DEFAULT_DELTA = 1e-4


class Optimum(NamedTuple):
    value: float
    point: np.ndarray
    info: dict


class MultimodalityWarning(RuntimeWarning):
    """Restarts of a concave maximization ended at different values."""


# -- sandwiched kernel --------------------------------------------------------

def _power_derivative(w, V, E, p):
    return ops.spectral_derivative(w, V, E, lambda x: x ** p, lambda x: p * x ** (p - 1))


def _log2_derivative(w, V, E):
    return ops.spectral_derivative(w, V, E, np.log2, lambda x: 1.0 / (x * LN2))


def _noise_tol(alpha: float, tol: float) -> float:
    """Stationarity target that respects the ``1/(a-1)`` amplification of
    rounding noise in sandwiched objectives near ``a = 1``.  The value error at
    this stationarity is of order its square, far below the reported accuracy.
    """
    return max(tol, math.sqrt(1e-15 / abs(alpha - 1.0)))


class _Sandwiched:
    """``f(sigma) = (1/(a-1)) log tr (S X S)^a`` with ``S = L ⊗ sigma^s``.

    ``X`` lives on ``A ⊗ B`` (restricted so ``L`` and the optimal ``sigma``
    are full rank); ``L`` is a fixed positive matrix on ``A`` or ``None`` for
    the identity.
    """

    def __init__(self, X, dA, dB, alpha, left=None):
        self.X, self.dA, self.dB, self.a = X, dA, dB, float(alpha)
        self.s = (1.0 - self.a) / (2.0 * self.a)
        self.left = np.eye(dA) if left is None else left

    def evaluate(self, sigma, want_x_grad=False):
        a, s = self.a, self.s
        ws, Vs = ops.eigh(sigma)
        ws = np.clip(ws, 1e-300, None)
        Ss = ops.from_eig(ws ** s, Vs)
        S = np.kron(self.left, Ss)
        Y = ops.herm(S @ self.X @ S)
        w, V = ops.eigh(Y)
        top = w.max()
        wn = np.clip(w / top, 0.0, None)
        mask = wn > 1e-13
        q_hat = np.sum(wn[mask] ** a)
        f = (a * math.log2(top) + math.log2(q_hat)) / (a - 1.0)
        pw = np.zeros_like(wn)
        pw[mask] = wn[mask] ** (a - 1.0)
        Ypow = ops.from_eig(pw, V)
        scale = 1.0 / (top * q_hat * (a - 1.0) * LN2)
        H = ops.herm(Ypow @ S @ self.X)
        Hl = (np.kron(self.left, np.eye(self.dB)) @ H).reshape(self.dA, self.dB, self.dA, self.dB)
        NB = ops.herm(np.einsum("ibic->bc", Hl))
        g_sigma = 2.0 * a * scale * _power_derivative(ws, Vs, NB, s)
        if not want_x_grad:
            return f, g_sigma
        g_x = a * scale * ops.herm(S @ Ypow @ S)
        return f, g_sigma, g_x


def _restrict_bipartite(rho, dims):
    dA, dB = dims
    ra = ops.partial_trace(rho, dims, [0])
    rb = ops.partial_trace(rho, dims, [1])
    UA, UB = support_basis(ra), support_basis(rb)
    U = np.kron(UA, UB)
    return ops.herm(U.conj().T @ rho @ U), UA, UB


def sandwiched_mutual_info(rho_ab, dims: Sequence[int], alpha, tol: float = 1e-8,
                           max_iter: int = 20000, sigma0=None) -> Optimum:
    """``min_sigma D*_alpha(rho_AB || rho_A ⊗ sigma_B)`` and its minimizer.

    The minimization runs over states supported on ``supp(rho_B)``, which loses
    nothing for ``alpha >= 1/2`` (data processing under the projection onto
    that support).  ``alpha = 1`` returns the mutual information with
    ``sigma_B = rho_B``.
    """
    order = as_order(alpha)
    rho_ab = ops.check_state(np.asarray(rho_ab))
    dims = [int(d) for d in dims]
    if len(dims) != 2 or dims[0] * dims[1] != rho_ab.shape[0]:
        raise ShapeError("sandwiched_mutual_info needs dims = [dA, dB] matching the state")
    rb_full = ops.partial_trace(rho_ab, dims, [1])
    if order.limit:
        from .divergence import mutual_information
        return Optimum(mutual_information(rho_ab, dims), rb_full,
                       {"iterations": 0, "stationarity": 0.0, "converged": True})
    a = order.alpha
    if a < 0.5:
        raise InvariantError("Renyi mutual information is handled for alpha >= 1/2")
    r, UA, UB = _restrict_bipartite(rho_ab, dims)
    dA, dB = UA.shape[1], UB.shape[1]
    ra = ops.partial_trace(r, [dA, dB], [0])
    left = ops.psd_power(ra, (1 - a) / (2 * a))
    kern = _Sandwiched(r, dA, dB, a, left)
    if sigma0 is None:
        s0 = np.eye(dB) / dB
    else:
        s0 = ops.herm(UB.conj().T @ sigma0 @ UB)
        s0 = 0.9 * s0 / np.trace(s0).real + 0.1 * np.eye(dB) / dB
    tol = _noise_tol(a, tol)
    res = mirror_descent(lambda x: kern.evaluate(x), s0, max_iter=max_iter, tol=tol)
    info = {"iterations": res.iterations, "stationarity": res.stationarity,
            "converged": res.converged}
    if not res.converged and res.stationarity > 1e3 * tol:
        raise ConvergenceError("sigma_B minimization did not converge",
                               best=UB @ res.point @ UB.conj().T, details=info)
    return Optimum(float(res.value), UB @ res.point @ UB.conj().T, info)


# -- channel Rényi information ---------------------------------------------------

class _ChannelProblem:
    """Objective ``f(sigma, rho) = D*_a(N(psi_rho) || rho^T ⊗ sigma)`` written as
    ``(1/(a-1)) log tr[(sigma^s X sigma^s)^a]`` with ``X = (id ⊗ N)(v v^dagger)``
    and ``v = (1 ⊗ rho^(1/2a)) sum_x |x>|x>``.  No negative power of ``rho``
    appears, so the form is stable near the boundary.
    """

    def __init__(self, channel: ops.QuantumChannel, alpha: float):
        self.channel = channel
        self.a = float(alpha)
        self.p = 1.0 / (2.0 * self.a)
        d = channel.d_in
        UB = support_basis(channel(np.eye(d) / d))
        self.UB = UB
        self.Kr = np.einsum("jb,kja->kba", UB.conj(), channel.kraus)
        self.d, self.dB = d, UB.shape[1]

    def X(self, M):
        W = np.einsum("kba,ax->kxb", self.Kr, M).reshape(len(self.Kr), -1)
        return W.T @ W.conj()

    def inner(self, rho, sigma0, tol, max_iter=20000):
        w, V = ops.eigh(rho)
        M = ops.from_eig(np.clip(w, 0, None) ** self.p, V)
        kern = _Sandwiched(self.X(M), self.d, self.dB, self.a)
        res = mirror_descent(lambda x: kern.evaluate(x), sigma0, max_iter=max_iter, tol=tol)
        return res, kern, (w, V, M)

    def rho_gradient(self, kern, sigma, eig):
        w, V, M = eig
        f, _, gx = kern.evaluate(sigma, want_x_grad=True)
        d, dB = self.d, self.dB
        G4 = gx.reshape(d, dB, d, dB)
        W = np.einsum("kba,ax->kxb", self.Kr, M)
        C = np.einsum("kxb,xbyc,kca->ya", W.conj(), G4, self.Kr)
        GM = C + C.conj().T
        return f, _power_derivative(np.clip(w, 1e-300, None), V, GM, self.p)


def _start_states(d: int, restarts: int, seed: int, rho0=None) -> list[np.ndarray]:
    skew = np.diag(np.linspace(2.0, 1.0, d))
    skew /= np.trace(skew)
    rng = np.random.default_rng(seed)
    starts = [np.eye(d) / d, skew, 0.5 * ops.random_density(d, rng) + 0.5 * np.eye(d) / d]
    if rho0 is not None:
        rho0 = ops.herm(np.asarray(rho0, dtype=complex))
        starts = [0.99 * rho0 + 0.01 * np.eye(d) / d] + starts
    return starts[:max(1, restarts)]


def _maximize_channel(prob: _ChannelProblem, rho0, tol, inner_tol, max_iter):
    state = {"sigma": np.eye(prob.dB) / prob.dB, "inner": 0}

    def fun(rho):
        res, kern, eig = prob.inner(rho, state["sigma"], inner_tol)
        state["sigma"] = 0.999 * res.point + 0.001 * np.eye(prob.dB) / prob.dB
        state["inner"] += res.iterations
        f, g = prob.rho_gradient(kern, res.point, eig)
        state["last_sigma"] = res.point
        return -f, -g

    res = mirror_descent(fun, rho0, max_iter=max_iter, tol=tol)
    return res, state


def channel_renyi_info(channel: ops.QuantumChannel, alpha, restarts: int = 3, seed: int = 0,
                       rho0=None, tol: float = 1e-6, inner_tol: float = 1e-8,
                       max_iter: int = 2000) -> Optimum:
    """``max_rho I*_alpha(A:B)`` at ``N(psi(rho))`` and the maximizing input ``rho``.

    The objective is concave in ``rho``; the outer mirror ascent uses the
    gradient at the inner minimizer (Danskin).  Restarts from ``I/d``, a
    skewed diagonal state and a seeded random state act as a certificate:
    spread above 1e-5 triggers a :class:`MultimodalityWarning`.
    """
    order = as_order(alpha)
    if order.limit:
        return ea_capacity(channel, restarts=restarts, seed=seed, rho0=rho0, tol=tol)
    if order.alpha < 0.5:
        raise InvariantError("channel Renyi information is handled for alpha >= 1/2")
    prob = _ChannelProblem(channel, order.alpha)
    tol, inner_tol = _noise_tol(order.alpha, tol), _noise_tol(order.alpha, inner_tol)
    runs = []
    for start in _start_states(prob.d, restarts, seed, rho0):
        res, state = _maximize_channel(prob, start, tol, inner_tol, max_iter)
        runs.append((-res.value, res, state))
    values = [r[0] for r in runs]
    best = int(np.argmax(values))
    value, res, state = runs[best]
    spread = max(values) - min(values)
    info = {"iterations": res.iterations, "stationarity": res.stationarity,
            "converged": res.converged, "inner_iterations": sum(r[2]["inner"] for r in runs),
            "restart_values": values, "restart_spread": spread,
            "sigma": prob.UB @ state["last_sigma"] @ prob.UB.conj().T}
    if spread > 1e-5:
        info["multimodal"] = True
        warnings.warn(f"restarts disagree by {spread:.3g} bits", MultimodalityWarning)
    if not res.converged and res.stationarity > 100 * tol:
        raise ConvergenceError("input maximization did not converge", best=res.point, details=info)
    return Optimum(float(value), res.point, info)


def complementary_output(channel: ops.QuantumChannel, rho):
    K = channel.kraus
    return np.einsum("kai,ij,laj->kl", K, rho, K.conj())


def _entropy_grad(X):
    """Value and gradient (in bits) of ``-tr X log X`` restricted to the support."""
    w, V = ops.eigh(X)
    mask = w > ops.support_threshold(w)
    lw = np.zeros_like(w)
    lw[mask] = np.log2(w[mask])
    h = -float(np.sum(w[mask] * lw[mask]))
    g = -ops.from_eig(np.where(mask, lw + 1.0 / LN2, 0.0), V)
    return h, g


def ea_capacity(channel: ops.QuantumChannel, restarts: int = 3, seed: int = 0, rho0=None,
                tol: float = 1e-8, max_iter: int = 5000) -> Optimum:
    """Entanglement-assisted capacity ``max_rho I(A:B)`` at ``N(psi(rho))``.

    Uses ``I = H(rho) + H(N(rho)) - H(N^c(rho))`` with ``N^c`` the
    complementary channel, a concave function of ``rho``.
    """
    K = channel.kraus

    def fun(rho):
        h1, g1 = _entropy_grad(rho)
        out = channel(rho)
        h2, g2 = _entropy_grad(out)
        env = complementary_output(channel, rho)
        h3, g3 = _entropy_grad(env)
        grad = g1 + channel.adjoint(g2) - np.einsum("lk,lai,kaj->ij", g3, K.conj(), K)
        return -(h1 + h2 - h3), -ops.herm(grad)

    runs = []
    for start in _start_states(channel.d_in, restarts, seed, rho0):
        res = mirror_descent(fun, start, max_iter=max_iter, tol=tol)
        runs.append(res)
    values = [-r.value for r in runs]
    best = runs[int(np.argmax(values))]
    spread = max(values) - min(values)
    info = {"iterations": best.iterations, "stationarity": best.stationarity,
            "converged": best.converged, "restart_values": values, "restart_spread": spread}
    if spread > 1e-5:
        info["multimodal"] = True
        warnings.warn(f"capacity restarts disagree by {spread:.3g} bits", MultimodalityWarning)
    return Optimum(float(-best.value), best.point, info)


def output_mutual_information(channel: ops.QuantumChannel, rho) -> float:
    """``I(A:B)`` at ``N(psi(rho))`` evaluated directly from the joint state."""
    from .divergence import mutual_information
    v = ops.canonical_input_state(rho)
    d = channel.d_in
    joint = ops.apply_channel(channel, ops.projector(v), [d, d], acting_on=1)
    return mutual_information(joint, [d, channel.d_out])


# -- exponents --------------------------------------------------------------------

@dataclass
class ExponentQuery:
    """Rate and solver settings for an exponent computation."""

    rate: float
    delta: float = DEFAULT_DELTA
    lambda_tol: float = 1e-5
    tol: float = 1e-7
    inner_tol: float = 1e-8

    def __post_init__(self):
        if not self.rate > 0:
            raise InvariantError("rate must be positive")
        if not 0 < self.delta < 0.5:
            raise InvariantError("lambda window parameter must lie in (0, 1/2)")
        if not (self.tol > 0 and self.inner_tol > 0 and self.lambda_tol > 0):
            raise InvariantError("tolerances must be positive")


@dataclass
class ExponentResult:
    rate: float
    value: float
    lambda_star: float
    alpha_star: float
    input_state: np.ndarray | None
    truncation_bound: float
    status: str
    inner_iterations: int = 0
    trace: list = field(default_factory=list)
    capacity: float | None = None


def _as_query(q) -> ExponentQuery:
    return q if isinstance(q, ExponentQuery) else ExponentQuery(float(q))


def _exponent(channel, q: ExponentQuery, scale: float, capacity: float | None):
    R = q.rate
    if capacity is None:
        capacity = ea_capacity(channel).value
    if R <= scale * capacity:
        return ExponentResult(R, 0.0, 0.0, 1.0, None, 0.0, "below_capacity", 0, [], capacity)
    memo: dict[float, tuple] = {}
    warm = {"rho": None}

    def objective(lam):
        alpha = 1.0 / (1.0 - lam)
        opt = channel_renyi_info(channel, alpha, restarts=2, rho0=warm["rho"], tol=q.tol,
                                 inner_tol=q.inner_tol)
        warm["rho"] = opt.point
        memo[lam] = (alpha, opt)
        return lam * (R - scale * opt.value)

    gs = golden_section_max(objective, q.delta, 1.0 - q.delta, tol=q.lambda_tol)
    trace = []
    for lam, h in gs.points:
        alpha, opt = memo[lam]
        trace.append({"lambda": lam, "alpha": alpha, "info": opt.value, "objective": h,
                      "iterations": opt.info["iterations"],
                      "inner_iterations": opt.info["inner_iterations"]})
    inner = sum(t["inner_iterations"] for t in trace)
    i_max = memo[1.0 - q.delta][1].value
    trunc = q.delta * abs(R - scale * i_max)
    lam_star = gs.x
    alpha_star, opt_star = memo[lam_star]
    value = max(0.0, gs.value)
    status = "ok" if gs.value > 0 else "nonpositive_objective"
    if lam_star >= 1.0 - q.delta:
        status = "boundary"
    return ExponentResult(R, value, lam_star, alpha_star, opt_star.point, trunc, status,
                          inner, trace, capacity)


def strong_converse_exponent(channel: ops.QuantumChannel, q, capacity: float | None = None
                             ) -> ExponentResult:
    """``sup_{lambda in [d, 1-d]} lambda (R - I*_{1/(1-lambda)}(N))``, floored at 0.

    ``lambda I*`` is convex in ``lambda``, so the objective is concave and a
    golden-section search (endpoints included) finds the sup.  Returns 0
    without searching when ``R <= C_E``.  ``truncation_bound`` is
    ``d |R - I*_{alpha_max}|``.
    """
    return _exponent(channel, _as_query(q), 1.0, capacity)


def feedback_exponent(channel: ops.QuantumChannel, q, capacity: float | None = None
                      ) -> ExponentResult:
    """Exponent with quantum feedback instead of entanglement: the same formula."""
    return strong_converse_exponent(channel, q, capacity)


def quantum_exponent(channel: ops.QuantumChannel, q, capacity: float | None = None
                     ) -> ExponentResult:
    """``sup_lambda lambda (R - I*_alpha(N) / 2)`` for quantum communication."""
    return _exponent(channel, _as_query(q), 0.5, capacity)


def pf_ps_transform(value: float, direction: str = "ps_to_pf") -> float:
    """Convert between optimal success probability and fidelity.

    ``P_f(k) = sqrt(P_s(k^2))``: ``"ps_to_pf"`` takes ``P_s`` at ``k^2``
    messages to ``P_f`` at dimension ``k``; ``"pf_to_ps"`` squares.
    """
    if not 0.0 <= value <= 1.0:
        raise InvariantError(f"probability {value!r} outside [0, 1]")
    if direction == "ps_to_pf":
        return math.sqrt(value)
    if direction == "pf_to_ps":
        return value * value
    raise ValueError(f"unknown direction {direction!r}")


def fidelity_exponent_from_success(success_exponent: float) -> float:
    """Exponent of ``P_f`` at rate ``R`` from the exponent of ``P_s`` at ``2R``."""
    return 0.5 * success_exponent


# -- log-Euclidean channel information -----------------------------------------------

def block_ensemble(blocks: Sequence[Sequence[int]], weights: Sequence[float], d: int
                   ) -> StateEnsemble:
    """Maximally entangled states on ``span{|i>|i> : i in block}`` for each block."""
    states = []
    for blk in blocks:
        v = np.zeros(d * d, dtype=complex)
        for i in blk:
            v[i * d + i] = 1.0
        states.append(v / np.linalg.norm(v))
    return StateEnsemble(np.asarray(weights, dtype=float), states, dims=[d, d])


class _Member:
    """One ensemble member pushed through the channel and restricted to supports."""

    def __init__(self, channel, psi, dA):
        dIn = channel.d_in
        rho = ops.projector(psi) if psi.ndim == 1 else psi
        ops.check_state(rho)
        if rho.shape[0] != dA * dIn:
            raise ShapeError("ensemble state does not match the channel input")
        out = ops.apply_channel(channel, rho, [dA, dIn], acting_on=1)
        self.dims = [dA, channel.d_out]
        self.full = out
        psi_a = ops.partial_trace(rho, [dA, dIn], [0])
        r, UA, UB = _restrict_bipartite(out, self.dims)
        psi_a_r = ops.herm(UA.conj().T @ psi_a @ UA)
        # supp(psi_A) can be larger than supp(tr_B N(psi)) only if N kills a
        # direction, which trace preservation forbids; check anyway
        if abs(np.trace(psi_a_r).real - 1.0) > 1e-9:
            raise InvariantError("A-marginal support mismatch")
        self.rho, self.psi_a, self.UA, self.UB = r, psi_a_r, UA, UB
        self.dA, self.dB = UA.shape[1], UB.shape[1]
        self.log_psi_a = ops.psd_log2(psi_a_r)
        self.Urho = support_basis(r)
        self.rank = self.Urho.shape[1]

    def embed_b(self, sigma):
        return self.UB @ sigma @ self.UB.conj().T

    def embed_ab(self, tau):
        U = np.kron(self.UA, self.UB)
        return U @ tau @ U.conj().T


class _LogEuclidean:
    """``g(sigma) = D♭_a(rho || psi_A ⊗ sigma)`` with analytic gradient.

    ``psi_A ⊗ sigma`` is full rank on the restricted space, so for ``a > 1`` the
    exponent is compressed onto ``supp(rho)`` (the exact singular limit) and
    the value is ``log tr 2^H / (a-1)`` with ``H`` affine in ``log sigma``.
    """

    def __init__(self, m: _Member, alpha: float):
        self.m, self.a = m, float(alpha)
        a, U = self.a, m.Urho
        self.U = U
        H0 = a * ops.psd_log2(m.rho) + (1 - a) * np.kron(m.log_psi_a, np.eye(m.dB))
        self.base = ops.herm(U.conj().T @ H0 @ U)

    def evaluate(self, sigma):
        a, m, U = self.a, self.m, self.U
        ws, Vs = ops.eigh(sigma)
        ws = np.clip(ws, 1e-300, None)
        ls = np.kron(np.eye(m.dA), ops.from_eig(np.log2(ws), Vs))
        h, V = ops.eigh(self.base + (1 - a) * (U.conj().T @ ls @ U))
        lq = log2_sum_exp2(h)
        p = np.exp2(h - lq)
        gibbs = U @ ((V * p) @ V.conj().T) @ U.conj().T
        omega_b = ops.partial_trace(gibbs, [m.dA, m.dB], [1])
        grad = -_log2_derivative(ws, Vs, ops.herm(omega_b))
        return float(lq / (a - 1)), grad, gibbs


def _minimize_log_euclidean(m: _Member, alpha: float, sigma0=None, tol=1e-9, max_iter=20000):
    kern = _LogEuclidean(m, alpha)
    s0 = np.eye(m.dB) / m.dB if sigma0 is None else sigma0
    res = mirror_descent(lambda x: kern.evaluate(x)[:2], s0, max_iter=max_iter,
                         tol=_noise_tol(alpha, tol))
    return res


def _as_ensemble(channel, ens, dims=None) -> tuple[StateEnsemble, int]:
    if not isinstance(ens, StateEnsemble):
        ens = StateEnsemble([1.0], [np.asarray(ens)], dims=dims)
    dA = ens.dims[0] if ens.dims else (len(ens.states[0]) if ens.states[0].ndim == 1
                                       else ens.states[0].shape[0]) // channel.d_in
    return ens, dA


def log_euclidean_channel_info(channel: ops.QuantumChannel, ens, alpha, tol: float = 1e-9,
                               dims=None) -> Optimum:
    """``sum_t q(t) min_sigma D♭_alpha(N(psi^t) || psi^t_A ⊗ sigma_B)`` for ``alpha > 1``.

    ``ens`` may be a :class:`StateEnsemble` or a single state (vector or
    density matrix on ``A ⊗ A'``).  The point returned is the list of
    minimizing ``sigma_B``.  Restricting ``sigma_B`` to ``supp(tr_A N(psi))``
    loses nothing (variational form plus data processing of ``D``).
    """
    a = as_order(alpha).alpha
    if not a > 1:
        raise InvariantError("log-Euclidean channel information is defined here for alpha > 1")
    ens, dA = _as_ensemble(channel, ens, dims)
    total, sigmas, iters = 0.0, [], []
    for q, psi in ens:
        m = _Member(channel, psi, dA)
        res = _minimize_log_euclidean(m, a, tol=tol)
        if not res.converged and res.stationarity > 1e3 * tol:
            raise ConvergenceError("sigma_B minimization did not converge",
                                   best=m.embed_b(res.point),
                                   details={"stationarity": res.stationarity})
        total += q * res.value
        sigmas.append(m.embed_b(res.point))
        iters.append(res.iterations)
    return Optimum(float(total), sigmas, {"iterations": iters})


# -- exponent candidate F ---------------------------------------------------------------

@dataclass
class VariationalAssignment:
    """Per-member states ``tau^t_AB`` with their support-feasibility record."""

    taus: list
    feasible: list
    mutual_info: float = 0.0
    relative_entropy: float = 0.0
    lam: float = 0.0


class _TauProblem:
    """``min_tau lam R - (1-lam) H(tau) - lam H(tau_B) + tr tau (lam log psi_A - log rho)``.

    ``tau`` is parameterized on ``supp(rho)`` where ``rho = N(psi)``.  The
    minimum equals ``lam (R - D(tau||psi_A ⊗ tau_B)) + D(tau||rho)`` at the
    optimizer, one member of the ensemble.
    """

    def __init__(self, m: _Member):
        self.m = m
        U = m.Urho
        self.U = U
        self.c_psi = U.conj().T @ np.kron(m.log_psi_a, np.eye(m.dB)) @ U
        self.c_rho = U.conj().T @ ops.psd_log2(m.rho) @ U

    def parts(self, t):
        """``(H(tau), H(tau_B), tr tau log psi_A, tr tau log rho)`` and their gradients."""
        m, U = self.m, self.U
        h, gh = _entropy_grad(t)
        full = U @ t @ U.conj().T
        tb = ops.partial_trace(full, [m.dA, m.dB], [1])
        hb, gb = _entropy_grad(tb)
        ghb = U.conj().T @ np.kron(np.eye(m.dA), gb) @ U
        lp = np.trace(t @ self.c_psi).real
        lr = np.trace(t @ self.c_rho).real
        return (h, hb, lp, lr), (gh, ghb)

    def objective(self, lam):
        def fun(t):
            (h, hb, lp, lr), (gh, ghb) = self.parts(t)
            val = -(1 - lam) * h - lam * hb + lam * lp - lr
            grad = -(1 - lam) * gh - lam * ghb + lam * self.c_psi - self.c_rho
            return val, ops.herm(grad)
        return fun

    def measures(self, t):
        """``(D(tau||psi_A ⊗ tau_B), D(tau||rho))``."""
        (h, hb, lp, lr), _ = self.parts(t)
        return -h - lp + hb, -h - lr


def _ensemble_members(channel, ens, dims=None):
    ens, dA = _as_ensemble(channel, ens, dims)
    return ens, [_Member(channel, psi, dA) for psi in ens.states]


def _positive_part_slope(values: dict, lam_hi: float, delta: float) -> float:
    """Left secant slope at the upper window end, from the cached evaluations."""
    lo = lam_hi - delta
    if lo in values:
        return (values[lam_hi] - values[lo]) / delta
    return math.nan


@dataclass
class FResult:
    value: float
    lambda_star: float
    window_value: float
    truncation_bound: float
    trace: list


def exponent_candidate_F(channel: ops.QuantumChannel, R: float, ens, delta: float = DEFAULT_DELTA,
                         lambda_tol: float = 1e-6, tol: float = 1e-9, dims=None) -> FResult:
    """``sup_{alpha>1} ((alpha-1)/alpha) (R - I♭_alpha(N, ens))`` via the ``lambda`` window.

    The objective ``V(lambda) = lambda (R - I♭)`` is concave with ``V(0) = 0``.
    A golden-section search over ``[delta, 1-delta]`` gives the window value.
    When the maximizer sits at the upper end, the left secant slope ``s`` over
    one more ``delta`` step bounds the missing part: by concavity
    ``V(1-delta) <= sup <= V(1-delta) + delta s``.  The returned value is that
    upper end, and ``delta s`` is the reported truncation bound.
    """
    if R < 0:
        raise InvariantError("rate must be nonnegative")
    ens, members = _ensemble_members(channel, ens, dims)
    warm = [None] * len(members)
    cache = {}

    def V(lam):
        a = 1.0 / (1.0 - lam)
        total = 0.0
        for i, (q, m) in enumerate(zip(ens.weights, members)):
            res = _minimize_log_euclidean(m, a, sigma0=warm[i], tol=tol)
            warm[i] = 0.999 * res.point + 0.001 * np.eye(m.dB) / m.dB
            total += q * res.value
        cache[lam] = lam * (R - total)
        return cache[lam]

    if R == 0:
        return FResult(0.0, 0.0, 0.0, 0.0, [])
    gs = golden_section_max(V, delta, 1.0 - delta, tol=lambda_tol)
    window = max(0.0, gs.value)
    value, trunc = window, 0.0
    hi = 1.0 - delta
    if gs.x == hi:
        V(hi - delta)
        slope = _positive_part_slope(cache, hi, delta)
        if slope > 0:
            trunc = delta * slope
            value = window + trunc
    trace = sorted(cache.items())
    return FResult(value, gs.x if gs.value > 0 else 0.0, window, trunc, trace)


def _tau_sweep(channel, R, ens, lambdas, delta, lambda_tol, tol, dims=None, golden=True):
    """Evaluate ``V(lambda)`` (variational side) on a golden-section path plus ``lambdas``."""
    ens, members = _ensemble_members(channel, ens, dims)
    probs = [_TauProblem(m) for m in members]
    warm = [np.eye(m.rank) / m.rank for m in members]
    records = {}

    def V(lam):
        if lam in records:
            return records[lam]["V"]
        total, I, D, taus, iters = 0.0, 0.0, 0.0, [], 0
        for i, (q, p) in enumerate(zip(ens.weights, probs)):
            res = mirror_descent(p.objective(lam), warm[i], max_iter=50000, tol=tol)
            warm[i] = 0.999 * res.point + 0.001 * np.eye(len(res.point)) / len(res.point)
            i_t, d_t = p.measures(res.point)
            total += q * (lam * R + res.value)
            I += q * i_t
            D += q * d_t
            taus.append(res.point)
            iters += res.iterations
        records[lam] = {"V": total, "I": I, "D": D, "taus": taus, "iterations": iters}
        return total

    gs = golden_section_max(V, delta, 1.0, tol=lambda_tol) if golden else None
    for lam in lambdas:
        V(lam)
    return ens, members, probs, records, gs


def variational_F(channel: ops.QuantumChannel, R: float, ens, delta: float = DEFAULT_DELTA,
                  lambda_tol: float = 1e-6, tol: float = 1e-10, dims=None
                  ) -> tuple[float, VariationalAssignment]:
    """``inf_tau (R - sum q D(tau||psi_A ⊗ tau_B))_+ + sum q D(tau||N(psi))``.

    Solved through its Lagrangian dual: for fixed ``lambda`` the inner problem
    in ``tau`` is convex (entropic mirror descent), and
    ``F = max_{lambda in [0, 1]} V(lambda)`` with ``V`` concave.  ``lambda = 1``
    is well posed here, so the window's upper end is exact.
    """
    if R < 0:
        raise InvariantError("rate must be nonnegative")
    if R == 0:
        ens, members = _ensemble_members(channel, ens, dims)
        taus = [m.full for m in members]
        return 0.0, VariationalAssignment(taus, [True] * len(taus), lam=0.0)
    ens, members, probs, records, gs = _tau_sweep(channel, R, ens, [], delta, lambda_tol, tol, dims)
    value = max(0.0, gs.value)
    rec = records[gs.x]
    taus = [m.embed_ab(p.U @ t @ p.U.conj().T) for m, p, t in zip(members, probs, rec["taus"])]
    feasible = [_supported(t, m.full) for t, m in zip(taus, members)]
    return value, VariationalAssignment(taus, feasible, rec["I"], rec["D"], gs.x)


def _supported(tau, rho) -> bool:
    P = support_projector(rho)
    Q = np.eye(len(rho)) - P
    return bool(np.linalg.norm(Q @ tau @ Q, 2) <= 1e-9)


def _mutual_info_bound(members, weights) -> float:
    """Upper bound on ``sum q D(tau||psi_A ⊗ tau_B)`` over all feasible ``tau``."""
    total = 0.0
    for q, m in zip(weights, members):
        wa = np.linalg.eigvalsh(m.psi_a)
        total += q * (-math.log2(wa.min()) + min(math.log2(m.dA), math.log2(m.dB)))
    return total


@dataclass
class SplitResult:
    F1: float
    F2: float
    F: float
    F1_status: str
    candidates: list


def f1_f2_split(channel: ops.QuantumChannel, R: float, ens, delta: float = DEFAULT_DELTA,
                grid: int = 21, lambda_tol: float = 1e-6, tol: float = 1e-10, dims=None
                ) -> SplitResult:
    """Constrained infima ``F1`` (mutual-information constraint ``> R``) and ``F2`` (``<= R``).

    Sweeps the multiplier ``lambda`` over a grid plus the golden-section path
    of the dual, takes the minimizer ``tau(lambda)`` of each inner problem and
    files it under ``F1`` or ``F2`` by its mutual information.  ``F1 = +inf``
    when ``R`` exceeds an a-priori bound on the constraint function
    (``F1_status = "empty_by_bound"``); if no sweep point lands in ``F1`` the
    status is ``"no_candidate"``.
    """
    lambdas = list(np.linspace(delta, 1.0, grid))
    ens, members, probs, records, gs = _tau_sweep(channel, R, ens, lambdas, delta, lambda_tol,
                                                  tol, dims)
    f1, f2 = math.inf, math.inf
    cands = []
    for lam, rec in sorted(records.items()):
        I, D = rec["I"], rec["D"]
        if I > R:
            f1 = min(f1, D)
            cands.append((lam, I, D, "F1"))
        else:
            f2 = min(f2, R - I + D)
            cands.append((lam, I, D, "F2"))
    bound = _mutual_info_bound(members, ens.weights)
    if R >= bound:
        status, f1 = "empty_by_bound", math.inf
    elif math.isinf(f1):
        status = "no_candidate"
    else:
        status = "found"
    return SplitResult(f1, f2, min(f1, f2), status, cands)
