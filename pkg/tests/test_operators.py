import numpy as np
import pytest
from hypothesis import given, strategies as st

from eaexponent import operators as ops
from eaexponent.errors import DomainError, InvariantError, ShapeError

PHI = ops.projector(ops.maximally_entangled(2))


def test_eigensystem_ascending():
    w, V = ops.hermitian_eigensystem(np.diag([2.0, 1.0]))
    assert np.allclose(w, [1.0, 2.0])
    assert np.allclose(np.abs(V.conj().T @ V), np.eye(2))


def test_non_hermitian_rejected():
    with pytest.raises(InvariantError):
        ops.hermitian_eigensystem(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_spectral_apply_sqrt():
    assert np.allclose(ops.spectral_apply(np.diag([4.0, 9.0]), np.sqrt), np.diag([2.0, 3.0]))


def test_spectral_apply_log_support_only():
    out = ops.spectral_apply(np.eye(2) / 2, np.log2, support_only=True)
    assert np.allclose(out, -np.eye(2))
    out = ops.spectral_apply(np.diag([1.0, 0.0]), np.log2, support_only=True)
    assert np.allclose(out, 0.0)


def test_spectral_apply_fractional_power():
    a = 2.0
    out = ops.spectral_apply(np.eye(4) / 4, lambda x: x ** ((1 - a) / (2 * a)))
    assert np.allclose(out, 4 ** 0.25 * np.eye(4))


def test_spectral_apply_rejects_negative():
    with pytest.raises(DomainError):
        ops.spectral_apply(np.diag([1.0, -0.5]), np.sqrt)


def test_partial_trace_of_bell_state():
    assert np.allclose(ops.partial_trace(PHI, [2, 2], [0]), np.eye(2) / 2)
    assert np.allclose(ops.partial_trace(PHI, [2, 2], [1]), np.eye(2) / 2)


def test_partial_trace_shape_error():
    with pytest.raises(ShapeError):
        ops.partial_trace(PHI, [2, 3], [0])


def test_partial_trace_of_product(rng):
    a, b, c = (ops.random_density(d, rng) for d in (2, 3, 2))
    joint = ops.tensor_product(a, b, c)
    assert np.allclose(ops.partial_trace(joint, [2, 3, 2], [0, 2]), np.kron(a, c))
    assert np.allclose(ops.partial_trace(joint, [2, 3, 2], [1]), b)


def test_permute_systems_swaps_product(rng):
    a, b = ops.random_density(2, rng), ops.random_density(3, rng)
    assert np.allclose(ops.permute_systems(np.kron(a, b), [2, 3], [1, 0]), np.kron(b, a))


def test_fully_depolarizing_output():
    ch = ops.QuantumChannel.depolarizing(1.0)
    assert np.allclose(ch(np.diag([1.0, 0.0])), np.eye(2) / 2)


def test_depolarizing_on_half_of_bell_state():
    ch = ops.QuantumChannel.depolarizing(0.1)
    out = ops.apply_channel(ch, PHI, [2, 2], acting_on=1)
    # Kraus-sum oracle written out directly
    oracle = sum(np.kron(np.eye(2), K) @ PHI @ np.kron(np.eye(2), K).conj().T for K in ch.kraus)
    assert np.allclose(out, oracle)
    assert np.isclose(np.trace(PHI @ out).real, 0.925)
    rest = np.eye(4) - PHI
    assert np.allclose(rest @ out @ rest, 0.025 * rest)


def test_channel_validation():
    with pytest.raises(InvariantError):
        ops.QuantumChannel(np.array([np.eye(2), np.eye(2)]))
    with pytest.raises(InvariantError):
        ops.QuantumChannel.depolarizing(1.5)


def test_choi_of_identity():
    assert np.allclose(ops.QuantumChannel.identity(2).choi() / 2, PHI)


def test_adjoint_is_trace_dual(rng):
    ch = ops.QuantumChannel.random(2, 3, 2, rng)
    rho, X = ops.random_density(2, rng), ops.random_psd(3, rng)
    assert np.isclose(np.trace(ch(rho) @ X), np.trace(rho @ ch.adjoint(X)))


def test_canonical_input_state():
    v = ops.canonical_input_state(np.eye(2) / 2)
    assert np.allclose(ops.projector(v), PHI)
    v = ops.canonical_input_state(np.diag([0.75, 0.25]))
    s = np.linalg.svd(v.reshape(2, 2), compute_uv=False)
    assert np.allclose(np.sort(s), np.sqrt([0.25, 0.75]))


def test_canonical_input_marginals(rng):
    rho = ops.random_density(3, rng)
    P = ops.projector(ops.canonical_input_state(rho))
    assert np.allclose(ops.partial_trace(P, [3, 3], [1]), rho)
    assert np.allclose(ops.partial_trace(P, [3, 3], [0]), rho.T)


def test_pinching_examples():
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(ops.pinching(np.eye(2), X), X)
    assert ops.distinct_eigenvalue_count(np.eye(2)) == 1
    assert np.allclose(ops.pinching(np.diag([1.0, 2.0]), X), 0.0)
    assert ops.distinct_eigenvalue_count(np.diag([1.0, 2.0])) == 2
    assert ops.distinct_eigenvalue_count(np.diag([0.5, 0.5, 0.25])) == 2


def test_eigenvalue_grouping_tolerance():
    assert ops.distinct_eigenvalue_count(np.diag([1.0, 1.0 + 1e-10])) == 1
    assert ops.distinct_eigenvalue_count(np.diag([1.0, 1.0 + 1e-6])) == 2


def test_spectral_derivative_matches_finite_difference(rng):
    X = ops.random_psd(3, rng) + 0.1 * np.eye(3)
    E = ops.herm(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    w, V = ops.eigh(X)
    D = ops.spectral_derivative(w, V, E, np.log2, lambda x: 1 / (x * np.log(2)))
    h = 1e-6
    fd = (ops.psd_log2(X + h * E) - ops.psd_log2(X - h * E)) / (2 * h)
    assert np.allclose(D, fd, atol=1e-6)


@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_pinching_inequality_property(d, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, d + 1))
    U = ops.random_unitary(d, rng)
    sigma = ops.herm(U @ np.diag(rng.uniform(0.1, 1, k)[rng.integers(0, k, d)]) @ U.conj().T)
    X = ops.random_psd(d, rng)
    v = ops.distinct_eigenvalue_count(sigma)
    P = ops.pinching(sigma, X)
    assert np.linalg.eigvalsh(v * P - X)[0] >= -1e-9
    # the pinched operator commutes with sigma
    assert np.allclose(P @ sigma, sigma @ P, atol=1e-9)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_random_channel_is_trace_preserving(d_in, d_out, rank, seed):
    rng = np.random.default_rng(seed)
    if d_out * rank < d_in:
        with pytest.raises(ShapeError):
            ops.QuantumChannel.random(d_in, d_out, rank, rng)
        return
    ch = ops.QuantumChannel.random(d_in, d_out, rank, rng)
    rho = ops.random_density(d_in, rng)
    out = ch(rho)
    assert np.isclose(np.trace(out).real, 1.0)
    assert np.linalg.eigvalsh(out)[0] >= -1e-12
