import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eaexponent import divergence as dv
from eaexponent import operators as ops
from eaexponent.errors import InvariantError

PHI = ops.projector(ops.maximally_entangled(2))
KET0 = np.diag([1.0, 0.0])


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def classical(p, q, a):
    return math.log2(sum(x ** a * y ** (1 - a) for x, y in zip(p, q) if x > 0)) / (a - 1)


# -- values -------------------------------------------------------------------------

def test_relative_entropy_commuting():
    val = dv.relative_entropy(np.diag([0.5, 0.5]), np.diag([0.25, 0.75]))
    expected = 0.5 * math.log2(0.5 / 0.25) + 0.5 * math.log2(0.5 / 0.75)
    assert val == pytest.approx(expected, abs=1e-12)
    assert val == pytest.approx(0.2075, abs=1e-4)


def test_disjoint_supports_are_infinite():
    for D in (dv.sandwiched_divergence, dv.log_euclidean_divergence):
        for a in (0.5, 2.0):
            val = D(KET0, np.diag([0.0, 1.0]), a)
            assert math.isinf(val)
            assert val.support == dv.INFINITE_BY_SUPPORT
    assert math.isinf(dv.relative_entropy(KET0, np.diag([0.0, 1.0])))


def test_commuting_pair_order_two():
    rho, sigma = np.diag([0.5, 0.5]), np.diag([0.25, 0.75])
    for D in (dv.sandwiched_divergence, dv.log_euclidean_divergence):
        assert D(rho, sigma, 2.0) == pytest.approx(math.log2(4 / 3), abs=1e-12)
        assert D(rho, sigma, 2.0) == pytest.approx(0.41504, abs=1e-5)


def test_pure_state_against_maximally_mixed():
    assert dv.sandwiched_divergence(KET0, np.eye(2) / 2, 2.0) == pytest.approx(1.0, abs=1e-12)


def test_support_mismatch_above_one():
    rho = np.eye(2) / 2
    assert math.isinf(dv.sandwiched_divergence(rho, KET0, 2.0))
    assert math.isinf(dv.log_euclidean_divergence(rho, KET0, 2.0))
    # below one only orthogonality makes the value infinite
    assert math.isfinite(dv.sandwiched_divergence(rho, KET0, 0.5))
    assert math.isfinite(dv.log_euclidean_divergence(rho, KET0, 0.5))


def test_order_validation():
    with pytest.raises(InvariantError):
        dv.RenyiOrder(0.0)
    with pytest.raises(InvariantError):
        dv.RenyiOrder(1.0)
    assert dv.RenyiOrder.from_lambda(0.5).alpha == pytest.approx(2.0)
    assert dv.RenyiOrder(2.0).lam == pytest.approx(0.5)
    assert dv.as_order(1.0).limit


def test_order_one_is_relative_entropy(rng):
    rho, sigma = ops.random_density(3, rng), ops.random_density(3, rng)
    d = float(dv.relative_entropy(rho, sigma))
    assert float(dv.sandwiched_divergence(rho, sigma, 1.0)) == d
    assert float(dv.sandwiched_divergence(rho, sigma, 1 + 1e-6)) == pytest.approx(d, abs=1e-5)
    assert float(dv.log_euclidean_divergence(rho, sigma, 1 - 1e-6)) == pytest.approx(d, abs=1e-5)


def test_divergence_value_type():
    v = dv.DivergenceValue(0.3)
    assert isinstance(v, float) and v.is_finite and v + 1 == pytest.approx(1.3)
    inf = dv.DivergenceValue.infinite()
    assert math.isinf(inf) and not inf.is_finite
    with pytest.raises(ValueError):
        dv.DivergenceValue(math.inf)


# -- singular log-Euclidean pairs ------------------------------------------------------

def test_log_euclidean_pure_state_closed_form(rng):
    # for pure rho and full-rank sigma the intersection of supports is the
    # line through psi, so the value is -<psi|log sigma|psi> for every order
    psi = ops.random_pure(3, rng)
    sigma = ops.random_density(3, rng)
    expected = -np.vdot(psi, ops.psd_log2(sigma) @ psi).real
    for a in (0.3, 0.7, 1.5, 4.0):
        assert dv.log_euclidean_divergence(ops.projector(psi), sigma, a) == pytest.approx(
            expected, abs=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_log_euclidean_compression_matches_extrapolation(seed):
    rng = np.random.default_rng(seed)
    d = 4
    rho = ops.random_density(d, rng, rank=2)
    sigma = ops.random_density(d, rng, rank=3)
    for a in (0.3, 0.7):
        closed = dv.log_euclidean_divergence(rho, sigma, a)
        extrap = dv.log_euclidean_extrapolated(rho, sigma, a)
        assert float(closed) == pytest.approx(float(extrap), abs=1e-5)
    sigma_full = ops.random_density(d, rng)
    for a in (1.5, 3.0):
        closed = dv.log_euclidean_divergence(rho, sigma_full, a)
        extrap = dv.log_euclidean_extrapolated(rho, sigma_full, a)
        assert float(closed) == pytest.approx(float(extrap), abs=1e-5)


def test_log_euclidean_variational_form(rng):
    rho, sigma = ops.random_density(3, rng), ops.random_density(3, rng)
    for a in (0.5, 2.0, 3.0):
        assert float(dv.log_euclidean_variational(rho, sigma, a)) == pytest.approx(
            float(dv.log_euclidean_divergence(rho, sigma, a)), abs=1e-5)


# -- entropic quantities -------------------------------------------------------------

def test_entropy_examples():
    assert dv.von_neumann_entropy(KET0) == 0.0
    assert dv.von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)
    assert dv.von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(0.8113, abs=1e-4)


def test_mutual_information_examples():
    assert dv.mutual_information(PHI, [2, 2]) == pytest.approx(2.0, abs=1e-10)
    werner = 0.7 * PHI + 0.3 * np.eye(4) / 4
    ra, rb = ops.partial_trace(werner, [2, 2], [0]), ops.partial_trace(werner, [2, 2], [1])
    expected = (dv.von_neumann_entropy(ra) + dv.von_neumann_entropy(rb)
                - dv.von_neumann_entropy(werner))
    assert dv.mutual_information(werner, [2, 2]) == pytest.approx(expected, abs=1e-10)


def test_holevo_of_two_pure_states():
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    ens = dv.StateEnsemble([0.5, 0.5], [np.array([1.0, 0.0]), plus])
    lam = 0.5 * (1 + 1 / math.sqrt(2))
    assert dv.holevo_information(ens) == pytest.approx(h2(lam), abs=1e-10)
    assert dv.holevo_information(ens) == pytest.approx(0.6009, abs=1e-4)


def test_ensemble_validation():
    with pytest.raises(InvariantError):
        dv.StateEnsemble([0.5, 0.6], [KET0, KET0])


def test_fidelity_examples(rng):
    assert dv.fidelity(KET0, np.eye(2) / 2) == pytest.approx(1 / math.sqrt(2))
    rho = ops.random_density(3, rng)
    assert dv.fidelity(rho, rho) == pytest.approx(1.0)


# -- properties ------------------------------------------------------------------------

orders = st.sampled_from([0.5, 0.7, 1.5, 2.0, 3.0])
seeds = st.integers(0, 2**31 - 1)


@given(st.integers(2, 4), orders, seeds)
def test_commuting_collapse_property(d, a, seed):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(d)), rng.dirichlet(np.ones(d))
    c = classical(p, q, a)
    assert float(dv.sandwiched_divergence(np.diag(p), np.diag(q), a)) == pytest.approx(c, abs=1e-8)
    assert float(dv.log_euclidean_divergence(np.diag(p), np.diag(q), a)) == pytest.approx(c, abs=1e-8)


@given(st.integers(2, 4), orders, seeds)
def test_unitary_invariance_and_additivity(d, a, seed):
    rng = np.random.default_rng(seed)
    rho, sigma = ops.random_density(d, rng), ops.random_density(d, rng)
    U = ops.random_unitary(d, rng)
    r2, s2 = ops.random_density(2, rng), ops.random_density(2, rng)
    for D in (dv.sandwiched_divergence, dv.log_euclidean_divergence):
        base = float(D(rho, sigma, a))
        assert float(D(U @ rho @ U.conj().T, U @ sigma @ U.conj().T, a)) == pytest.approx(
            base, abs=1e-8)
        joint = float(D(np.kron(rho, r2), np.kron(sigma, s2), a))
        assert joint == pytest.approx(base + float(D(r2, s2, a)), abs=1e-8)


@given(st.integers(2, 3), orders, seeds)
def test_sandwiched_data_processing(d, a, seed):
    rng = np.random.default_rng(seed)
    rho, sigma = ops.random_density(d, rng), ops.random_density(d, rng)
    ch = ops.QuantumChannel.random(d, 2, 3, rng)
    assert float(dv.sandwiched_divergence(ch(rho), ch(sigma), a)) <= float(
        dv.sandwiched_divergence(rho, sigma, a)) + 1e-9


@given(st.integers(2, 4), orders, seeds)
def test_sandwiched_versus_log_euclidean_ordering(d, a, seed):
    rng = np.random.default_rng(seed)
    rho, sigma = ops.random_density(d, rng), ops.random_density(d, rng)
    gap = float(dv.sandwiched_divergence(rho, sigma, a)) - float(
        dv.log_euclidean_divergence(rho, sigma, a))
    assert gap >= -1e-9 if a > 1 else gap <= 1e-9


@given(st.integers(2, 4), seeds)
def test_nonnegative_for_states(d, seed):
    rng = np.random.default_rng(seed)
    rho, sigma = ops.random_density(d, rng), ops.random_density(d, rng, rank=int(rng.integers(1, d + 1)))
    for a in (0.5, 2.0):
        assert float(dv.sandwiched_divergence(rho, sigma, a)) >= -1e-10
        assert float(dv.log_euclidean_divergence(rho, sigma, a)) >= -1e-10
