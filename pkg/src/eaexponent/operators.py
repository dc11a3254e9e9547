"""Finite-dimensional Hermitian linear algebra.

States are plain complex ``numpy`` arrays.  Composite systems carry an
explicit ``dims`` list; the leftmost factor is the first listed system and
composite indices are row-major, matching ``numpy.kron``.  Logarithms and
exponentials are base 2 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InvariantError, ShapeError

HERMITIAN_RTOL = 1e-10
PSD_CLIP = 1e-10
SUPPORT_RTOL = 1e-10
EIGEN_GROUP_RTOL = 1e-8

LN2 = np.log(2.0)


def herm(X: np.ndarray) -> np.ndarray:
    return 0.5 * (X + X.conj().T)


def check_hermitian(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {H.shape}")
    scale = np.max(np.abs(H)) if H.size else 0.0
    if np.max(np.abs(H - H.conj().T), initial=0.0) > HERMITIAN_RTOL * max(scale, 1e-300):
        raise InvariantError("matrix is not Hermitian")
    return H


def check_state(rho: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    """Validate a density operator: Hermitian, PSD to ``-atol``, unit trace."""
    rho = check_hermitian(rho)
    if abs(np.trace(rho).real - 1.0) > atol:
        raise InvariantError(f"trace {np.trace(rho).real!r} differs from 1")
    if np.linalg.eigvalsh(rho)[0] < -atol:
        raise InvariantError("density operator has a negative eigenvalue")
    return rho


def check_psd(sigma: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    sigma = check_hermitian(sigma)
    if sigma.size and np.linalg.eigvalsh(sigma)[0] < -atol:
        raise InvariantError("operator is not positive semidefinite")
    return sigma


def hermitian_eigensystem(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in ascending order and orthonormal eigenvectors (columns)."""
    H = check_hermitian(H)
    w, V = np.linalg.eigh(herm(H))
    return w, V


def support_threshold(w: np.ndarray) -> float:
    top = np.max(np.abs(w)) if w.size else 0.0
    return SUPPORT_RTOL * top


def spectral_apply(H: np.ndarray, f: Callable[[np.ndarray], np.ndarray],
                   support_only: bool = False) -> np.ndarray:
    """Return ``V diag(f(w)) V^dagger`` for a PSD Hermitian ``H``.

    Eigenvalues in ``[-1e-10, 0)`` are clipped to zero first.  With
    ``support_only`` set, eigenvalues below ``1e-10 * max|w|`` map to 0 and
    ``f`` is evaluated on the rest only.
    """
    w, V = hermitian_eigensystem(H)
    if w.size and w[0] < -PSD_CLIP * max(1.0, np.max(np.abs(w))):
        raise DomainError(f"operator has eigenvalue {w[0]!r} below the PSD clip")
    w = np.where(w < 0, 0.0, w)
    fw = np.zeros_like(w)
    mask = w > support_threshold(w) if support_only else np.ones(w.shape, dtype=bool)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(w[mask]), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError("function is undefined on part of the spectrum")
    fw[mask] = vals
    return (V * fw) @ V.conj().T


# -- fast internal kernels (no validation) ---------------------------------

def eigh(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(herm(X))


def from_eig(w: np.ndarray, V: np.ndarray) -> np.ndarray:
    return (V * w) @ V.conj().T


def psd_power(X: np.ndarray, p: float) -> np.ndarray:
    """``X**p`` on the support of ``X`` (pseudo-inverse powers for ``p < 0``)."""
    w, V = eigh(X)
    mask = w > support_threshold(w)
    fw = np.zeros_like(w)
    fw[mask] = w[mask] ** p
    return from_eig(fw, V)


def psd_log2(X: np.ndarray) -> np.ndarray:
    """Base-2 logarithm restricted to the support of ``X``."""
    w, V = eigh(X)
    mask = w > support_threshold(w)
    fw = np.zeros_like(w)
    fw[mask] = np.log2(w[mask])
    return from_eig(fw, V)


def log2_full(X: np.ndarray) -> np.ndarray:
    """Base-2 logarithm of a positive definite matrix (no support cut)."""
    w, V = eigh(X)
    return from_eig(np.log2(w), V)


def exp2_herm(H: np.ndarray) -> np.ndarray:
    w, V = eigh(H)
    return from_eig(np.exp2(w), V)


def divided_differences(w: np.ndarray, f: Callable, df: Callable) -> np.ndarray:
    """Loewner matrix ``(f(w_i) - f(w_j)) / (w_i - w_j)``, ``df`` on near-ties."""
    fw = f(w)
    dw = w[:, None] - w[None, :]
    close = np.abs(dw) <= 1e-9 * np.maximum(1.0, np.abs(w)[:, None])
    with np.errstate(all="ignore"):
        L = (fw[:, None] - fw[None, :]) / dw
    mid = 0.5 * (w[:, None] + w[None, :])
    L[close] = df(mid[close])
    return L


def spectral_derivative(w: np.ndarray, V: np.ndarray, E: np.ndarray,
                        f: Callable, df: Callable) -> np.ndarray:
    """Frechet derivative of ``X -> f(X)`` at ``X = V diag(w) V^dagger`` along ``E``.

    The map is self-adjoint for the trace inner product, so the same call
    also pulls gradients back through ``f``.
    """
    L = divided_differences(w, f, df)
    return V @ (L * (V.conj().T @ E @ V)) @ V.conj().T


# -- tensor structure -------------------------------------------------------

def tensor_product(*ops: np.ndarray) -> np.ndarray:
    return reduce(np.kron, ops)


def _check_dims(op: np.ndarray, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != op.shape[0]:
        raise ShapeError(f"dims {dims} do not match operator of size {op.shape[0]}")
    return dims


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep`` (kept in listed order)."""
    dims = _check_dims(rho, dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ShapeError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ShapeError(f"subsystem index out of range for dims {dims}")
    n = len(dims)
    T = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    res = np.einsum("".join(row) + "".join(col) + "->" + out, T)
    d = int(np.prod([dims[i] for i in keep]))
    return res.reshape(d, d)


def permute_systems(op: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: output factor ``i`` is input factor ``perm[i]``.

    Works on operators (square matrices) and on vectors.
    """
    dims = [int(d) for d in dims]
    n = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ShapeError(f"{perm} is not a permutation of {n} systems")
    if op.ndim == 1:
        return op.reshape(dims).transpose(perm).reshape(-1)
    T = op.reshape(dims + dims)
    T = T.transpose(perm + [n + p for p in perm])
    d = op.shape[0]
    return T.reshape(d, d)


def maximally_entangled(d: int) -> np.ndarray:
    """Unit vector ``sum_x |x>|x> / sqrt(d)``."""
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = 1.0
    return v / np.sqrt(d)


def projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def canonical_input_state(rho: np.ndarray) -> np.ndarray:
    """Purification ``(1 ⊗ sqrt(rho)) sum_x |x>|x>`` on ``A ⊗ A'`` as a unit vector.

    The ``A'`` marginal is ``rho`` and the ``A`` marginal is ``rho.T``.
    """
    rho = check_state(rho)
    root = spectral_apply(rho, np.sqrt)
    v = root.T.reshape(-1).astype(complex)
    return v / np.linalg.norm(v)


# -- channels ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map stored as Kraus operators of shape ``(d_out, d_in)``."""

    kraus: np.ndarray
    name: str = "channel"

    def __post_init__(self):
        K = np.asarray(self.kraus, dtype=complex)
        if K.ndim == 2:
            K = K[None]
        if K.ndim != 3:
            raise ShapeError("Kraus family must be a stack of matrices")
        K = np.ascontiguousarray(K)
        K.setflags(write=False)
        object.__setattr__(self, "kraus", K)
        tp = np.einsum("kai,kaj->ij", K.conj(), K)
        if np.max(np.abs(tp - np.eye(self.d_in))) > 1e-9:
            raise InvariantError("Kraus operators are not trace preserving")

    @property
    def d_in(self) -> int:
        return self.kraus.shape[2]

    @property
    def d_out(self) -> int:
        return self.kraus.shape[1]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        K = self.kraus
        if rho.shape != (self.d_in, self.d_in):
            raise ShapeError(f"channel expects a {self.d_in}x{self.d_in} input")
        return np.einsum("kai,ij,kbj->ab", K, rho, K.conj())

    def adjoint(self, X: np.ndarray) -> np.ndarray:
        K = self.kraus
        return np.einsum("kai,ab,kbj->ij", K.conj(), X, K)

    def choi(self) -> np.ndarray:
        """``sum_ij |i><j| ⊗ N(|i><j|)`` with the input factor first."""
        d = self.d_in
        J = np.zeros((d * self.d_out, d * self.d_out), dtype=complex)
        for i in range(d):
            for j in range(d):
                E = np.zeros((d, d))
                E[i, j] = 1.0
                J[i * self.d_out:(i + 1) * self.d_out, j * self.d_out:(j + 1) * self.d_out] = self(E)
        return J

    def tensor(self, other: "QuantumChannel") -> "QuantumChannel":
        K = np.array([np.kron(a, b) for a in self.kraus for b in other.kraus])
        return QuantumChannel(K, name=f"{self.name}⊗{other.name}")

    def tensor_power(self, m: int) -> "QuantumChannel":
        return reduce(lambda a, b: a.tensor(b), [self] * m)

    # presets ---------------------------------------------------------------

    @classmethod
    def identity(cls, d: int = 2) -> "QuantumChannel":
        return cls(np.eye(d)[None], name=f"identity:{d}")

    @classmethod
    def depolarizing(cls, p: float, d: int = 2) -> "QuantumChannel":
        """``N(rho) = (1 - p) rho + p tr(rho) I/d``."""
        if not 0.0 <= p <= 1.0:
            raise InvariantError("depolarizing parameter must lie in [0, 1]")
        ops = []
        for y in range(d):
            for z in range(d):
                w = (1 - p + p / d**2) if (y, z) == (0, 0) else p / d**2
                if w > 0:
                    ops.append(np.sqrt(w) * weyl_operator(d, y, z))
        return cls(np.array(ops), name=f"depolarizing:{p}:{d}")

    @classmethod
    def dephasing(cls, p: float) -> "QuantumChannel":
        """Qubit dephasing ``(1 - p) rho + p Z rho Z``."""
        if not 0.0 <= p <= 1.0:
            raise InvariantError("dephasing parameter must lie in [0, 1]")
        Z = np.diag([1.0, -1.0])
        return cls(np.array([np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * Z]), name=f"dephasing:{p}")

    @classmethod
    def amplitude_damping(cls, gamma: float) -> "QuantumChannel":
        if not 0.0 <= gamma <= 1.0:
            raise InvariantError("damping parameter must lie in [0, 1]")
        K0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]])
        K1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
        return cls(np.array([K0, K1]), name=f"amplitude-damping:{gamma}")

    @classmethod
    def classical(cls, W: np.ndarray) -> "QuantumChannel":
        """Embed a stochastic matrix ``W[y, x] = P(y|x)`` as diagonal Kraus family."""
        W = np.asarray(W, dtype=float)
        if np.any(W < 0) or np.max(np.abs(W.sum(axis=0) - 1)) > 1e-12:
            raise InvariantError("columns of W must be probability vectors")
        ops = []
        for y in range(W.shape[0]):
            for x in range(W.shape[1]):
                if W[y, x] > 0:
                    K = np.zeros(W.shape)
                    K[y, x] = np.sqrt(W[y, x])
                    ops.append(K)
        return cls(np.array(ops), name="classical")

    @classmethod
    def random(cls, d_in: int, d_out: int, rank: int, rng: np.random.Generator) -> "QuantumChannel":
        """Channel from a Haar-random isometry ``C^d_in -> C^d_out ⊗ C^rank``."""
        if d_out * rank < d_in:
            raise ShapeError(f"no isometry from dimension {d_in} into {d_out} x {rank}")
        V = random_unitary(d_out * rank, rng)[:, :d_in]
        K = V.reshape(d_out, rank, d_in).transpose(1, 0, 2)
        return cls(K, name=f"random:{d_in}:{d_out}:{rank}")


def weyl_operator(d: int, y: int, z: int) -> np.ndarray:
    """``sum_x exp(2 pi i x z / d) |x + y mod d><x|``."""
    x = np.arange(d)
    V = np.zeros((d, d), dtype=complex)
    V[(x + y) % d, x] = np.exp(2j * np.pi * x * z / d)
    return V


def apply_channel(channel: QuantumChannel, rho: np.ndarray, dims: Sequence[int] | None = None,
                  acting_on: int = 0) -> np.ndarray:
    """Apply ``channel`` to subsystem ``acting_on`` of ``rho`` (dims given)."""
    if dims is None:
        dims = [rho.shape[0]]
    dims = _check_dims(rho, dims)
    if not 0 <= acting_on < len(dims):
        raise ShapeError("acting_on is not a subsystem index")
    if dims[acting_on] != channel.d_in:
        raise ShapeError(f"subsystem {acting_on} has dimension {dims[acting_on]}, "
                         f"channel expects {channel.d_in}")
    n = len(dims)
    order = [acting_on] + [i for i in range(n) if i != acting_on]
    moved = permute_systems(rho, dims, order)
    din = dims[acting_on]
    rest = moved.shape[0] // din
    T = moved.reshape(din, rest, din, rest)
    K = channel.kraus
    out = np.einsum("kai,irjs,kbj->arbs", K, T, K.conj())
    dout = channel.d_out
    out = out.reshape(dout * rest, dout * rest)
    new_dims = [dout] + [dims[i] for i in order[1:]]
    inverse = list(np.argsort(order))
    return permute_systems(out, new_dims, inverse)


def output_dims(dims: Sequence[int], channel: QuantumChannel, acting_on: int) -> list[int]:
    dims = list(dims)
    dims[acting_on] = channel.d_out
    return dims


# -- pinching ----------------------------------------------------------------

def _group_eigenvalues(w: np.ndarray) -> list[np.ndarray]:
    groups = [[0]]
    for i in range(1, len(w)):
        if abs(w[i] - w[i - 1]) <= EIGEN_GROUP_RTOL * max(1.0, abs(w[i - 1])):
            groups[-1].append(i)
        else:
            groups.append([i])
    return [np.array(g) for g in groups]


def spectral_projections(sigma: np.ndarray) -> list[np.ndarray]:
    """Projectors onto the eigenspaces of ``sigma``, ascending eigenvalue order."""
    w, V = hermitian_eigensystem(sigma)
    return [V[:, g] @ V[:, g].conj().T for g in _group_eigenvalues(w)]


def distinct_eigenvalue_count(sigma: np.ndarray) -> int:
    w, _ = hermitian_eigensystem(sigma)
    return len(_group_eigenvalues(w))


def pinch(projections: Sequence[np.ndarray], X: np.ndarray) -> np.ndarray:
    return sum(P @ X @ P for P in projections)


def pinching(sigma: np.ndarray, X: np.ndarray) -> np.ndarray:
    """``sum_i P_i X P_i`` over the spectral projections of ``sigma``."""
    X = check_hermitian(X)
    if sigma.shape != X.shape:
        raise ShapeError("pinching operands differ in size")
    return pinch(spectral_projections(sigma), X)


# -- random instances --------------------------------------------------------

def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt random state of the given rank (full rank by default)."""
    k = d if rank is None else rank
    G = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = G @ G.conj().T
    return herm(rho / np.trace(rho).real)


def random_psd(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return herm(scale * G @ G.conj().T / d)
