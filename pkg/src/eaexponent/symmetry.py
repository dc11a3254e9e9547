"""Types, permutation representations and permutation-invariant states.

Tensor-power systems are ordered ``1, ..., n`` left to right.  A pure state
``psi`` on ``A ⊗ A'`` raised to the ``n``-th power is stored with all ``A``
factors first, i.e. on ``A^n ⊗ A'^n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import operators as ops
from .errors import InvariantError, ShapeError, SizeLimitError

MAX_TYPE_QUBITS = 12
MAX_SYMMETRIC_DIM = 256
MAX_PINCHED_OUTPUT = 64


# -- types ------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeVector:
    """Letter counts of a length-``n`` sequence over ``len(counts)`` letters."""

    counts: tuple

    def __post_init__(self):
        if any(int(c) != c or c < 0 for c in self.counts):
            raise InvariantError(f"type counts must be nonnegative integers: {self.counts}")
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts)

    def distribution(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n


def enumerate_types(n: int, k: int) -> list[TypeVector]:
    """All types of length-``n`` sequences over ``k`` letters, lexicographically
    descending (``(n, 0, ...)`` first)."""
    if n < 1 or k < 1:
        raise InvariantError("need n >= 1 and k >= 1")

    def rec(remaining, slots):
        if slots == 1:
            yield (remaining,)
            return
        for c in range(remaining, -1, -1):
            for rest in rec(remaining - c, slots - 1):
                yield (c,) + rest

    return [TypeVector(c) for c in rec(n, k)]


def type_class(t: TypeVector) -> int:
    """Number of sequences of type ``t`` (a multinomial coefficient)."""
    size = math.factorial(t.n)
    for c in t.counts:
        size //= math.factorial(c)
    return size


def type_class_sequences(t: TypeVector) -> Iterator[tuple]:
    """The sequences of type ``t`` in lexicographic order."""
    letters = [x for x, c in enumerate(t.counts) for _ in range(c)]
    # distinct permutations of a multiset, generated in order without duplicates
    seq = sorted(letters)
    while True:
        yield tuple(seq)
        i = len(seq) - 2
        while i >= 0 and seq[i] >= seq[i + 1]:
            i -= 1
        if i < 0:
            return
        j = len(seq) - 1
        while seq[j] <= seq[i]:
            j -= 1
        seq[i], seq[j] = seq[j], seq[i]
        seq[i + 1:] = reversed(seq[i + 1:])


@dataclass
class TypeDecomposition:
    """``psi^{⊗n} = sum_t sqrt(p^n(t)) Psi^t`` for a pure ``psi`` in Schmidt form.

    ``blocks[i]`` is the unit vector ``Psi^t`` on ``A^n ⊗ A'^n``, uniform over
    the pairs of Schmidt-basis products whose index sequence has type
    ``types[i]``.
    """

    n: int
    dims: tuple
    schmidt: np.ndarray
    types: list
    probabilities: np.ndarray
    sizes: list
    blocks: list

    def reassemble(self) -> np.ndarray:
        return sum(math.sqrt(p) * b for p, b in zip(self.probabilities, self.blocks))


def schmidt_decomposition(psi: np.ndarray, dims: Sequence[int], tol: float = 1e-10):
    """Schmidt coefficients (squared, descending) and bases of a unit vector.

    Coefficients below ``tol`` are dropped.  Ties keep the SVD's column order,
    which is deterministic for a given input.
    """
    dA, dB = int(dims[0]), int(dims[1])
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != dA * dB:
        raise ShapeError("vector does not match dims")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise InvariantError("pure state must be a unit vector")
    U, s, Vh = np.linalg.svd(psi.reshape(dA, dB))
    keep = s > tol
    return s[keep] ** 2, U[:, keep], Vh[keep].T


def tensor_power_vector(psi: np.ndarray, dims: Sequence[int], n: int) -> np.ndarray:
    """``psi^{⊗n}`` on ``A^n ⊗ A'^n`` (factors regrouped, ``A`` systems first)."""
    v = psi
    for _ in range(n - 1):
        v = np.kron(v, psi)
    perm = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    return ops.permute_systems(v, list(dims) * n, perm)


def type_decomposition(psi: np.ndarray, dims: Sequence[int], n: int) -> TypeDecomposition:
    dA, dB = int(dims[0]), int(dims[1])
    if n < 1:
        raise InvariantError("n must be positive")
    if n * math.log2(max(dA, dB)) > MAX_TYPE_QUBITS:
        raise SizeLimitError(f"n log|A| exceeds {MAX_TYPE_QUBITS} qubits")
    p, UA, UB = schmidt_decomposition(psi, dims)
    k = len(p)
    types = enumerate_types(n, k)
    probs, sizes, blocks = [], [], []
    for t in types:
        vec = np.zeros(dA ** n * dB ** n, dtype=complex)
        size = 0
        for seq in type_class_sequences(t):
            a = UA[:, seq[0]]
            b = UB[:, seq[0]]
            for x in seq[1:]:
                a = np.kron(a, UA[:, x])
                b = np.kron(b, UB[:, x])
            vec += np.kron(a, b)
            size += 1
        probs.append(size * float(np.prod(p ** np.asarray(t.counts))))
        sizes.append(size)
        blocks.append(vec / math.sqrt(size))
    probs = np.asarray(probs)
    if abs(probs.sum() - 1.0) > 1e-10:
        raise InvariantError("type probabilities do not sum to one")
    return TypeDecomposition(n, (dA, dB), p, types, probs, sizes, blocks)


# -- permutations ------------------------------------------------------------------

def _check_perm(perm: Sequence[int]) -> list[int]:
    perm = [int(i) for i in perm]
    if sorted(perm) != list(range(len(perm))):
        raise InvariantError(f"{perm} is not a permutation")
    return perm


def _inverse(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return inv


def permutation_index(perm: Sequence[int], d: int) -> np.ndarray:
    """Index map of ``W^perm``: ``(W v)[k] = v[idx[k]]``.

    ``W^perm`` moves the factor in slot ``i`` to slot ``perm[i]``, so
    ``W^a W^b = W^{a∘b}``.
    """
    perm = _check_perm(perm)
    n = len(perm)
    idx = np.arange(d ** n).reshape([d] * n)
    return idx.transpose(_inverse(perm)).reshape(-1)


def permutation_unitary(perm: Sequence[int], d: int, n: int | None = None) -> np.ndarray:
    """The permutation matrix ``W^perm`` on ``(C^d)^{⊗n}``."""
    perm = _check_perm(perm)
    if n is not None and n != len(perm):
        raise ShapeError("permutation length differs from n")
    idx = permutation_index(perm, d)
    return np.eye(len(idx))[idx]


def symmetrize(X: np.ndarray, d: int, n: int) -> np.ndarray:
    """Average of ``W X W^dagger`` over the symmetric group (``n!`` terms)."""
    if X.shape != (d ** n, d ** n):
        raise ShapeError("operator does not live on (C^d)^n")
    acc = np.zeros_like(X, dtype=complex)
    for perm in itertools.permutations(range(n)):
        idx = permutation_index(perm, d)
        acc += X[np.ix_(idx, idx)]
    return acc / math.factorial(n)


def transposition_sum(d: int, n: int) -> np.ndarray:
    """``sum_{i<j} W^{(i j)}``, a central element of the permutation algebra.

    On the isotypic component of a Young diagram it acts as the content sum of
    that diagram.
    """
    D = d ** n
    T = np.zeros((D, D))
    for i, j in itertools.combinations(range(n), 2):
        perm = list(range(n))
        perm[i], perm[j] = j, i
        T[np.arange(D), permutation_index(perm, d)] += 1.0
    return T


# -- Young diagrams ---------------------------------------------------------------------

def partitions(n: int, max_rows: int) -> list[tuple]:
    """Partitions of ``n`` with at most ``max_rows`` parts, largest first."""
    out = []

    def rec(remaining, cap, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if len(prefix) == max_rows:
            return
        for part in range(min(remaining, cap), 0, -1):
            rec(remaining - part, part, prefix + [part])

    rec(n, n, [])
    return out


def content_sum(shape: Sequence[int]) -> int:
    return sum(j - i for i, row in enumerate(shape) for j in range(row))


def symmetric_group_dim(shape: Sequence[int]) -> int:
    """Dimension of the symmetric-group irrep (hook length formula)."""
    n = sum(shape)
    cols = [sum(1 for r in shape if r > j) for j in range(shape[0])] if shape else []
    hooks = 1
    for i, row in enumerate(shape):
        for j in range(row):
            hooks *= (row - j - 1) + (cols[j] - i - 1) + 1
    return math.factorial(n) // hooks


def unitary_group_dim(shape: Sequence[int], d: int) -> int:
    """Dimension of the ``U(d)`` irrep (hook-content formula)."""
    cols = [sum(1 for r in shape if r > j) for j in range(shape[0])] if shape else []
    num, den = 1, 1
    for i, row in enumerate(shape):
        for j in range(row):
            num *= d + j - i
            den *= (row - j - 1) + (cols[j] - i - 1) + 1
    return num // den


# -- universal symmetric state -----------------------------------------------------

@dataclass
class IsotypicBlock:
    shape: tuple
    projector: np.ndarray
    multiplicity: int
    inner_dim: int


@dataclass
class UniversalSymmetricState:
    """``sigma^u = (1/K) sum_lambda P_lambda / tr P_lambda`` over the ``K``
    isotypic components of ``(C^d)^{⊗n}``.

    Every permutation-invariant state ``omega`` satisfies
    ``omega <= v sigma^u`` with ``v = K max_lambda dim U_lambda``: on each
    component ``omega = omega_lambda ⊗ 1_{m_lambda}`` with
    ``omega_lambda <= 1 / m_lambda``.
    """

    n: int
    d: int
    state: np.ndarray
    v: float
    bound: float
    blocks: list = field(default_factory=list)

    @property
    def within_bound(self) -> bool:
        return self.v <= self.bound

    def margin(self, omega: np.ndarray) -> float:
        """Smallest eigenvalue of ``v sigma^u - omega``."""
        return float(np.linalg.eigvalsh(self.v * self.state - ops.herm(omega))[0])


def dominance_bound(n: int, d: int) -> float:
    """``(n+1)^((d+2)(d-1)/2)``."""
    return float((n + 1) ** ((d + 2) * (d - 1) / 2))


def universal_symmetric_state(n: int, d: int) -> UniversalSymmetricState:
    if n < 1 or d < 1:
        raise InvariantError("need n >= 1 and d >= 1")
    if d ** n > MAX_SYMMETRIC_DIM:
        raise SizeLimitError(f"d^n = {d ** n} exceeds {MAX_SYMMETRIC_DIM}")
    shapes = partitions(n, d)
    contents = [content_sum(s) for s in shapes]
    if len(set(contents)) != len(contents):
        raise SizeLimitError("content sums collide; the transposition sum cannot "
                             "separate the isotypic components here")
    D = d ** n
    if n == 1:
        eigvals, V = np.zeros(D), np.eye(D)
    else:
        eigvals, V = np.linalg.eigh(transposition_sum(d, n))
    blocks = []
    for shape, c in zip(shapes, contents):
        cols = V[:, np.abs(eigvals - c) < 0.5]
        P = cols @ cols.conj().T
        m, u = symmetric_group_dim(shape), unitary_group_dim(shape, d)
        if cols.shape[1] != m * u:
            raise InvariantError(f"component {shape} has rank {cols.shape[1]}, expected {m * u}")
        blocks.append(IsotypicBlock(shape, P, m, u))
    K = len(blocks)
    state = sum(b.projector / (b.multiplicity * b.inner_dim) for b in blocks) / K
    v = float(K * max(b.inner_dim for b in blocks))
    return UniversalSymmetricState(n, d, ops.herm(state), v, dominance_bound(n, d), blocks)


def random_symmetric_state(d: int, n: int, rng: np.random.Generator,
                           rank: int | None = None) -> np.ndarray:
    """Symmetrization of a random state of the given rank."""
    return ops.herm(symmetrize(ops.random_density(d ** n, rng, rank), d, n))


def symmetrized_product_state(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Symmetrization of ``|v_1><v_1| ⊗ ... ⊗ |v_n><v_n|``."""
    d, n = len(vectors[0]), len(vectors)
    X = ops.projector(vectors[0])
    for v in vectors[1:]:
        X = np.kron(X, ops.projector(v))
    return ops.herm(symmetrize(X, d, n))


# -- pinched channel -----------------------------------------------------------------

def pinched_channel(channel: ops.QuantumChannel, m: int) -> ops.QuantumChannel:
    """``P_{sigma^u} ∘ N^{⊗m}`` with ``sigma^u`` on ``B^m``."""
    dB = channel.d_out
    if dB ** m > MAX_PINCHED_OUTPUT:
        raise SizeLimitError(f"|B|^m = {dB ** m} exceeds {MAX_PINCHED_OUTPUT}")
    usu = universal_symmetric_state(m, dB)
    projections = ops.spectral_projections(usu.state)
    base = channel.tensor_power(m).kraus
    kraus = np.concatenate([np.einsum("ab,kbc->kac", P, base) for P in projections])
    return ops.QuantumChannel(kraus)
