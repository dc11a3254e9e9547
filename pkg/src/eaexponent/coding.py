"""Entanglement-assisted codes at small blocklength.

A code shares ``n`` copies of a state ``rho = sum_t q(t) Psi^t`` on ``A ⊗ A'``
between receiver (``A``) and sender (``A'``), where each ``Psi^t`` is
maximally entangled on a block of basis vectors.  Message ``m`` is encoded by
a random block Heisenberg-Weyl unitary applied to the sender's share; by the
transpose identity ``(U ⊗ 1)|Psi^t> = (1 ⊗ U^T)|Psi^t>`` the same signal
arises from ``U`` on the receiver's share, which is how signals are built.
Decoding uses the square-root measurement.  Success probabilities are exact
traces, not samples.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import operators as ops
from .divergence import StateEnsemble
from .errors import InvariantError, ShapeError, SizeLimitError

MAX_DENSE_DIM = 4096
MAX_COMMUTING_ENTRIES = 2 ** 26


@dataclass(frozen=True)
class HeisenbergWeylIndex:
    d: int
    y: int
    z: int

    def __post_init__(self):
        if self.d < 1 or not (0 <= self.y < self.d and 0 <= self.z < self.d):
            raise InvariantError(f"invalid Heisenberg-Weyl index {self}")


def heisenberg_weyl(idx: HeisenbergWeylIndex) -> np.ndarray:
    """``V_{y,z} = sum_x exp(2 pi i x z / d) |x + y><x|``."""
    return ops.weyl_operator(idx.d, idx.y, idx.z)


# -- shared resource ------------------------------------------------------------------

@dataclass
class SharedBlocks:
    """Per-copy shared state ``sum_t q(t) Psi^t`` with ``Psi^t`` maximally
    entangled on ``span{|i>|i> : i in blocks[t]}`` inside ``C^d ⊗ C^d``."""

    d: int
    blocks: list
    weights: np.ndarray

    def __post_init__(self):
        seen = [i for b in self.blocks for i in b]
        if len(seen) != len(set(seen)) or any(not 0 <= i < self.d for i in seen):
            raise InvariantError("blocks must be disjoint subsets of range(d)")
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.blocks) or np.any(w < 0) or abs(w.sum() - 1) > 1e-10:
            raise InvariantError("block weights must be a probability vector")
        self.blocks = [tuple(int(i) for i in b) for b in self.blocks]
        self.weights = w

    @classmethod
    def maximally_entangled(cls, d: int) -> "SharedBlocks":
        return cls(d, [tuple(range(d))], np.array([1.0]))

    @property
    def is_full_block(self) -> bool:
        return len(self.blocks) == 1 and len(self.blocks[0]) == self.d

    def vectors(self) -> list[np.ndarray]:
        out = []
        for b in self.blocks:
            v = np.zeros(self.d * self.d, dtype=complex)
            v[[i * self.d + i for i in b]] = 1.0
            out.append(v / math.sqrt(len(b)))
        return out

    def state(self) -> np.ndarray:
        return sum(q * ops.projector(v) for q, v in zip(self.weights, self.vectors()))

    def block_unitary(self, indices: np.ndarray) -> np.ndarray:
        """``⊕_t V_{y_t, z_t}`` on the blocks (identity off the blocks)."""
        U = np.eye(self.d, dtype=complex)
        for b, (y, z) in zip(self.blocks, indices):
            U[np.ix_(b, b)] = ops.weyl_operator(len(b), int(y), int(z))
        return U


def _as_shared(shared, d: int) -> SharedBlocks:
    if shared is None:
        return SharedBlocks.maximally_entangled(d)
    if isinstance(shared, SharedBlocks):
        return shared
    if isinstance(shared, StateEnsemble):
        blocks = []
        for v in shared.states:
            if v.ndim != 1 or v.size != d * d:
                raise ShapeError("shared ensemble members must be vectors on C^d ⊗ C^d")
            M = v.reshape(d, d)
            blk = tuple(int(i) for i in np.flatnonzero(np.abs(np.diag(M)) > 1e-12))
            ref = np.zeros((d, d), dtype=complex)
            ref[blk, blk] = 1.0 / math.sqrt(len(blk))
            if np.linalg.norm(M - ref) > 1e-9:
                raise InvariantError("shared ensemble members must be block maximally entangled")
            blocks.append(blk)
        return SharedBlocks(d, blocks, shared.weights)
    raise ShapeError("shared resource must be SharedBlocks, a block StateEnsemble or None")


# -- codes ---------------------------------------------------------------------------

@dataclass
class EACode:
    """Entanglement-assisted code of blocklength ``n``.

    ``encoders[m, i, t] = (y, z)`` is the Heisenberg-Weyl index applied to
    block ``t`` of copy ``i`` for message ``m``.  ``decodable`` is the number of
    decoder outcomes; messages ``>= decodable`` are never decoded (padding).
    ``povm`` holds dense POVM elements on ``A^n ⊗ B^n`` or, on the commuting
    path, Bell-diagonal vectors.
    """

    n: int
    M: int
    shared: SharedBlocks
    encoders: np.ndarray
    decodable: int
    povm: list | np.ndarray | None
    commuting: bool
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def encoder_unitary(self, m: int, sender: bool = False) -> np.ndarray:
        """Unitary on ``A^n`` (receiver side) or its transpose on ``A'^n``."""
        U = np.ones((1, 1), dtype=complex)
        for i in range(self.n):
            U = np.kron(U, self.shared.block_unitary(self.encoders[m, i]))
        return U.T if sender else U


def _bell_distribution(channel: ops.QuantumChannel) -> np.ndarray | None:
    """Weights of ``(id ⊗ N)(Phi)`` in the basis ``(V_{y,z} ⊗ 1)|Phi>`` when it is
    diagonal there, else ``None``."""
    d = channel.d_in
    if channel.d_out != d:
        return None
    phi = ops.maximally_entangled(d)
    J = ops.apply_channel(channel, ops.projector(phi), [d, d], acting_on=1)
    B = np.array([np.kron(ops.weyl_operator(d, y, z), np.eye(d)) @ phi
                  for y in range(d) for z in range(d)]).T
    Jb = B.conj().T @ J @ B
    if np.max(np.abs(Jb - np.diag(np.diag(Jb)))) > 1e-12:
        return None
    q = np.diag(Jb).real
    # weights at rounding level are exact zeros (e.g. the identity channel)
    q = np.where(q > 1e-14, q, 0.0)
    return q / q.sum()


def _flat_index(enc: np.ndarray, d: int) -> np.ndarray:
    """Encoder table ``(M, n, 1, 2)`` -> flat Bell index in ``Z_{d^2}^n``."""
    digits = enc[:, :, 0, 0] * d + enc[:, :, 0, 1]
    n = digits.shape[1]
    return digits @ (d * d) ** np.arange(n - 1, -1, -1)


def _bell_shift_table(flat: np.ndarray, d: int, n: int) -> np.ndarray:
    """``table[m, b] = b - g_m`` componentwise in ``Z_d^{2n}``, as flat indices."""
    D = (d * d) ** n
    b = np.arange(D)
    yz_b = np.stack(np.unravel_index(b, [d] * (2 * n)))
    yz_g = np.stack(np.unravel_index(flat, [d] * (2 * n)))
    diff = (yz_b[:, None, :] - yz_g[:, :, None]) % d
    return np.ravel_multi_index(tuple(diff), [d] * (2 * n))


def _commuting_signals(q1: np.ndarray, code_enc: np.ndarray, d: int, n: int) -> np.ndarray:
    qn = q1
    for _ in range(n - 1):
        qn = np.kron(qn, q1)
    # per copy the Bell index is y*d + z and copy 1 is most significant, so the
    # flat index unravels over [d]*(2n) as (y1, z1, y2, z2, ...)
    flat = _flat_index(code_enc, d)
    return qn[_bell_shift_table(flat, d, n)]


def _channel_on_senders(channel, state, dA, n):
    dims = [dA] * n + [channel.d_in] * n
    for i in range(n):
        state = ops.apply_channel(channel, state, dims, acting_on=n + i)
        dims[n + i] = channel.d_out
    return state


def _shared_power(shared: SharedBlocks, n: int) -> np.ndarray:
    """``rho^{⊗n}`` on ``A^n ⊗ A'^n``."""
    d = shared.d
    rho = shared.state()
    R = rho
    for _ in range(n - 1):
        R = np.kron(R, rho)
    perm = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    return ops.permute_systems(R, [d, d] * n, perm)


def _choi_power(channel, shared, n):
    return _channel_on_senders(channel, _shared_power(shared, n), shared.d, n)


def _inv_sqrt(S: np.ndarray) -> np.ndarray:
    w, V = ops.eigh(S)
    cut = ops.support_threshold(w)
    inv = np.where(w > cut, 1.0 / np.sqrt(np.where(w > cut, w, 1.0)), 0.0)
    return ops.from_eig(inv, V)


def _dense_signals(channel, code: EACode) -> list[np.ndarray]:
    J = _choi_power(channel, code.shared, code.n)
    dB = channel.d_out ** code.n
    out = []
    for m in range(code.M):
        U = np.kron(code.encoder_unitary(m), np.eye(dB))
        out.append(U @ J @ U.conj().T)
    return out


def _sender_signals(channel, code: EACode) -> list[np.ndarray]:
    rho = _shared_power(code.shared, code.n)
    dA = code.shared.d ** code.n
    out = []
    for m in range(code.M):
        U = np.kron(np.eye(dA), code.encoder_unitary(m, sender=True))
        out.append(_channel_on_senders(channel, U @ rho @ U.conj().T, code.shared.d, code.n))
    return out


def _draw_codebook(sh: SharedBlocks, n: int, M: int, seed: int) -> np.ndarray:
    """Uniformly random distinct codewords when there are enough of them,
    otherwise i.i.d. uniform ones.  Shape ``(M, n, blocks, 2)``."""
    rng = np.random.default_rng(seed)
    radix = [len(b) for b in sh.blocks for _ in range(2)] * n
    shape = (M, n, len(sh.blocks), 2)
    total = math.prod(radix)
    if M <= total < 2 ** 62:
        flat = rng.choice(total, size=M, replace=False)
        return np.stack(np.unravel_index(flat, radix), axis=-1).reshape(shape)
    sizes = np.array([len(b) for b in sh.blocks])
    return np.floor(rng.random(shape) * sizes[None, None, :, None]).astype(int)


def build_ea_code(channel: ops.QuantumChannel, n: int, shared=None, rate: float = 1.0,
                  seed: int = 0, M: int | None = None, dense: bool = False) -> EACode:
    """Random block Heisenberg-Weyl code with ``M = floor(2^(n R))`` messages.

    Codewords are drawn uniformly without replacement while ``M`` does not
    exceed the number of distinct block Heisenberg-Weyl words.

    ``shared`` is a :class:`SharedBlocks`, a :class:`StateEnsemble` of block
    maximally entangled vectors, or ``None`` for ``Phi``.  When the shared
    state is ``Phi`` and ``(id ⊗ N)(Phi)`` is diagonal in the Bell basis, all
    signals commute and the code is stored in that basis (``dense=True``
    forces the matrix path).
    """
    if n < 1:
        raise InvariantError("blocklength must be positive")
    if channel.d_in < 1:
        raise ShapeError("empty channel")
    sh = _as_shared(shared, channel.d_in)
    if M is None:
        M = int(math.floor(2.0 ** (n * rate) + 1e-9))
    if M < 1:
        raise InvariantError("code needs at least one message")
    distinguishable = (sh.d * channel.d_out) ** n
    if M > distinguishable:
        warnings.warn(f"{M} messages exceed the {distinguishable}-dimensional receiver space",
                      RuntimeWarning)
    enc = _draw_codebook(sh, n, M, seed)
    q1 = _bell_distribution(channel) if sh.is_full_block and not dense else None
    meta = {"rate": rate, "shared_blocks": sh.blocks}
    if q1 is not None:
        d = sh.d
        if M * (d * d) ** n > MAX_COMMUTING_ENTRIES:
            raise SizeLimitError("commuting code table too large")
        P = _commuting_signals(q1, enc, d, n)
        S = P.sum(axis=0)
        povm = np.where(S > 0, P / np.where(S > 0, S, 1.0), 0.0)
        code = EACode(n, M, sh, enc, M, povm, True, seed, meta)
        code.meta["bell_weights"] = q1
        return code
    dim = (sh.d * channel.d_out) ** n
    if dim > MAX_DENSE_DIM or (sh.d * channel.d_in) ** n > MAX_DENSE_DIM:
        raise SizeLimitError(f"receiver dimension {dim} exceeds {MAX_DENSE_DIM}")
    code = EACode(n, M, sh, enc, M, None, False, seed, meta)
    signals = _dense_signals(channel, code)
    R = _inv_sqrt(sum(signals))
    code.povm = [ops.herm(R @ s @ R) for s in signals]
    return code


def success_probability(channel: ops.QuantumChannel, code: EACode, n: int | None = None,
                        side: str = "receiver") -> float:
    """``(1/M) sum_m tr[N^{⊗n}(E_m(rho)) Lambda_m]``.

    ``side="sender"`` encodes with ``U^T`` on the sender's share and pushes
    each signal through the channel, without the transpose shortcut.
    """
    if n is not None and n != code.n:
        raise ShapeError(f"code has blocklength {code.n}, not {n}")
    if code.commuting:
        if side != "receiver":
            raise InvariantError("the commuting representation has no sender-side form")
        q1 = _bell_distribution(channel)
        if q1 is None or np.max(np.abs(q1 - code.meta["bell_weights"])) > 1e-12:
            raise InvariantError("code was built for a different channel")
        P = _commuting_signals(q1, code.encoders[:code.decodable], code.shared.d, code.n)
        total = float(np.sum(P * code.povm[:code.decodable]))
    else:
        if side == "receiver":
            signals = _dense_signals(channel, code)
        elif side == "sender":
            signals = _sender_signals(channel, code)
        else:
            raise ValueError(f"unknown side {side!r}")
        if signals[0].shape != code.povm[0].shape:
            raise ShapeError("code and channel dimensions differ")
        total = sum(float(np.vdot(L, s).real) for L, s in zip(code.povm, signals[:code.decodable]))
    return float(min(1.0, max(0.0, total / code.M)))


def pad_code(code: EACode, M: int) -> EACode:
    """Extend to ``M >= code.M`` messages; new messages reuse message 0's
    encoder and are never decoded, so ``P_s`` scales by exactly ``M'/M``."""
    if M < code.M:
        raise InvariantError("padding cannot remove messages")
    extra = np.repeat(code.encoders[:1], M - code.M, axis=0)
    enc = np.concatenate([code.encoders, extra])
    return EACode(code.n, M, code.shared, enc, code.decodable, code.povm, code.commuting,
                  code.seed, dict(code.meta, padded_from=code.M))


def povm_completeness_gap(code: EACode) -> float:
    """Largest eigenvalue of ``sum_m Lambda_m - I`` (should be ``<= 1e-9``)."""
    if code.commuting:
        return float(np.max(np.sum(code.povm, axis=0)) - 1.0)
    return float(np.linalg.eigvalsh(sum(code.povm))[-1] - 1.0)


# -- quantum codes -----------------------------------------------------------------------

@dataclass
class QuantumCode:
    """Encoder ``M ⊗ Ã -> A'``, decoder ``B ⊗ B̃ -> M`` and shared state on
    ``Ã ⊗ B̃``.  ``shared_dims = (dim Ã, dim B̃)``; ``(1, 1)`` means no
    assistance."""

    dim: int
    encoder: ops.QuantumChannel
    decoder: ops.QuantumChannel
    shared: np.ndarray
    shared_dims: tuple


def unassisted_identity_code(d: int) -> QuantumCode:
    ident = ops.QuantumChannel.identity(d)
    return QuantumCode(d, ident, ident, np.ones((1, 1)), (1, 1))


def entanglement_fidelity(channel: ops.QuantumChannel, qcode: QuantumCode) -> float:
    """``F(D ∘ N ∘ E(Psi_{M'M} ⊗ rho), Psi_{M'M})`` with ``F`` the root fidelity."""
    d = qcode.dim
    sa, sb = qcode.shared_dims
    if qcode.encoder.d_in != d * sa or qcode.encoder.d_out != channel.d_in:
        raise ShapeError("encoder dimensions do not match the code and channel")
    if qcode.decoder.d_in != channel.d_out * sb or qcode.decoder.d_out != d:
        raise ShapeError("decoder dimensions do not match the code and channel")
    psi = ops.maximally_entangled(d)
    state = np.kron(ops.projector(psi), qcode.shared)        # M' M Ã B̃
    state = ops.apply_channel(qcode.encoder, state, [d, d * sa, sb], acting_on=1)
    state = ops.apply_channel(channel, state, [d, channel.d_in, sb], acting_on=1)
    state = ops.apply_channel(qcode.decoder, state, [d, channel.d_out * sb], acting_on=1)
    overlap = float(np.vdot(psi, state @ psi).real)
    return math.sqrt(min(1.0, max(0.0, overlap)))


# -- simulations -------------------------------------------------------------------------

@dataclass
class SimulationResult:
    rate: float
    blocklengths: list
    success: list
    messages: list
    seed: int
    slope: float = math.nan
    intercept: float = math.nan
    residual: float = math.nan
    dropped: list = field(default_factory=list)

    def __post_init__(self):
        if any(not 0.0 <= p <= 1.0 for p in self.success):
            raise InvariantError("success probabilities must lie in [0, 1]")

    def per_blocklength_exponents(self) -> list[float]:
        return [(-math.log2(p) / n if p > 0 else math.inf)
                for n, p in zip(self.blocklengths, self.success)]


def empirical_exponent(results: SimulationResult, rate: float | None = None
                       ) -> tuple[float, float]:
    """Least-squares slope of ``-log2 P_s`` against ``n`` and the RMS residual.

    Points with ``P_s = 0`` are dropped with a warning; at least 3 points must
    remain.  Also stores the fit on ``results``.
    """
    if rate is not None and abs(rate - results.rate) > 1e-12:
        raise InvariantError("rate differs from the simulated rate")
    ns, ys, dropped = [], [], []
    for n, p in zip(results.blocklengths, results.success):
        if p > 0:
            ns.append(n)
            ys.append(-math.log2(p))
        else:
            dropped.append(n)
    if dropped:
        warnings.warn(f"dropping blocklengths with zero success probability: {dropped}",
                      RuntimeWarning)
    if len(ns) < 3:
        raise InvariantError("need at least 3 blocklengths with positive success probability")
    A = np.vstack([np.asarray(ns, float), np.ones(len(ns))]).T
    coef, *_ = np.linalg.lstsq(A, np.asarray(ys), rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - ys) ** 2)))
    slope = float(coef[0])
    if abs(slope) < 1e-12:
        slope = 0.0
    results.slope, results.intercept, results.residual = slope, float(coef[1]), resid
    results.dropped = dropped
    return slope, resid


def simulate(channel: ops.QuantumChannel, rate: float, blocklengths: Sequence[int],
             seed: int = 0, shared=None) -> SimulationResult:
    """Build one random code per blocklength (seed ``seed + n``) and record ``P_s``."""
    ps, ms = [], []
    for n in blocklengths:
        code = build_ea_code(channel, int(n), shared, rate, seed=seed + int(n))
        ps.append(success_probability(channel, code))
        ms.append(code.M)
    res = SimulationResult(float(rate), [int(n) for n in blocklengths], ps, ms, int(seed))
    if sum(p > 0 for p in ps) >= 3:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            empirical_exponent(res)
    return res
