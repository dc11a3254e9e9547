import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eaexponent import coding
from eaexponent import operators as ops
from eaexponent import optimize as opt
from eaexponent.errors import InvariantError


def bell_vectors(d):
    phi = ops.maximally_entangled(d)
    return [np.kron(coding.heisenberg_weyl(coding.HeisenbergWeylIndex(d, y, z)), np.eye(d)) @ phi
            for y in range(d) for z in range(d)]


@pytest.mark.parametrize("d", [2, 3])
def test_heisenberg_weyl_bell_basis(d):
    B = np.array(bell_vectors(d))
    assert np.allclose(B.conj() @ B.T, np.eye(d * d), atol=1e-12)


def test_heisenberg_weyl_index_validation():
    with pytest.raises(InvariantError):
        coding.HeisenbergWeylIndex(2, 2, 0)


def test_shared_blocks_validation():
    with pytest.raises(InvariantError):
        coding.SharedBlocks(2, [[0, 1], [0]], [0.5, 0.5])
    sh = coding._as_shared(opt.block_ensemble([[0], [1]], [0.3, 0.7], 2), 2)
    assert sh.blocks == [(0,), (1,)]
    assert np.trace(sh.state()).real == pytest.approx(1.0)


@pytest.mark.parametrize("d", [2, 3])
def test_dense_coding_is_perfect(d):
    ident = ops.QuantumChannel.identity(d)
    code = coding.build_ea_code(ident, 1, None, 2 * math.log2(d), seed=3)
    assert code.M == d * d
    assert coding.success_probability(ident, code) == 1.0
    dense = coding.build_ea_code(ident, 1, None, 2 * math.log2(d), seed=3, dense=True)
    assert coding.success_probability(ident, dense) == pytest.approx(1.0, abs=1e-12)


def test_single_message_always_succeeds():
    ch = ops.QuantumChannel.depolarizing(0.3)
    code = coding.build_ea_code(ch, 2, None, 0.0, seed=1)
    assert code.M == 1
    assert coding.success_probability(ch, code) == pytest.approx(1.0)


def test_fully_depolarizing_is_guessing():
    ch = ops.QuantumChannel.depolarizing(1.0)
    code = coding.build_ea_code(ch, 2, None, 1.5, seed=1)
    assert coding.success_probability(ch, code) == pytest.approx(1.0 / code.M, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_commuting_path_matches_matrix_path(n):
    ch = ops.QuantumChannel.depolarizing(0.2)
    fast = coding.build_ea_code(ch, n, None, 1.6, seed=11)
    slow = coding.build_ea_code(ch, n, None, 1.6, seed=11, dense=True)
    assert fast.commuting and not slow.commuting
    assert np.array_equal(fast.encoders, slow.encoders)
    assert coding.success_probability(ch, fast) == pytest.approx(
        coding.success_probability(ch, slow), abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1])
def test_receiver_and_sender_encodings_agree(seed):
    rng = np.random.default_rng(seed)
    ch = ops.QuantumChannel.random(2, 2, 2, rng)
    for shared in (None, opt.block_ensemble([[0], [1]], [0.5, 0.5], 2)):
        code = coding.build_ea_code(ch, 2, shared, 1.0, seed=seed)
        assert not code.commuting
        a = coding.success_probability(ch, code, side="receiver")
        b = coding.success_probability(ch, code, side="sender")
        assert a == pytest.approx(b, abs=1e-12)


@pytest.mark.parametrize("dense", [False, True])
def test_padding_scales_success_exactly(dense):
    ch = ops.QuantumChannel.depolarizing(0.1)
    code = coding.build_ea_code(ch, 2, None, 1.5, seed=5, dense=dense)
    ps = coding.success_probability(ch, code)
    padded = coding.pad_code(code, 2 * code.M + 3)
    assert coding.success_probability(ch, padded) * padded.M == pytest.approx(ps * code.M, abs=1e-12)
    with pytest.raises(InvariantError):
        coding.pad_code(code, code.M - 1)


def test_povm_is_complete():
    ch = ops.QuantumChannel.amplitude_damping(0.2)
    code = coding.build_ea_code(ch, 2, None, 1.2, seed=2)
    assert coding.povm_completeness_gap(code) <= 1e-9
    fast = coding.build_ea_code(ops.QuantumChannel.depolarizing(0.1), 3, None, 1.5, seed=2)
    assert coding.povm_completeness_gap(fast) <= 1e-9


def test_codes_are_deterministic():
    ch = ops.QuantumChannel.depolarizing(0.1)
    a = coding.build_ea_code(ch, 3, None, 1.5, seed=9)
    b = coding.build_ea_code(ch, 3, None, 1.5, seed=9)
    assert np.array_equal(a.encoders, b.encoders)
    assert coding.success_probability(ch, a) == coding.success_probability(ch, b)


def test_codewords_are_distinct_when_possible():
    code = coding.build_ea_code(ops.QuantumChannel.identity(2), 2, None, 1.5, seed=0)
    words = {tuple(w.reshape(-1)) for w in code.encoders}
    assert len(words) == code.M


def test_commuting_code_rejects_other_channel():
    code = coding.build_ea_code(ops.QuantumChannel.depolarizing(0.1), 1, None, 1.0, seed=0)
    with pytest.raises(InvariantError):
        coding.success_probability(ops.QuantumChannel.depolarizing(0.3), code)


@settings(max_examples=10)
@given(st.integers(1, 3), st.floats(0.2, 2.0), st.integers(0, 1000))
def test_success_is_a_probability(n, rate, seed):
    ch = ops.QuantumChannel.depolarizing(0.15)
    code = coding.build_ea_code(ch, n, None, rate, seed=seed)
    ps = coding.success_probability(ch, code)
    assert 0.0 <= ps <= 1.0
    # the square-root measurement beats guessing
    assert ps >= 1.0 / code.M - 1e-12


# -- quantum codes -----------------------------------------------------------------------

def test_entanglement_fidelity_of_identity_code():
    qc = coding.unassisted_identity_code(2)
    assert coding.entanglement_fidelity(ops.QuantumChannel.identity(2), qc) == pytest.approx(1.0)
    assert coding.entanglement_fidelity(ops.QuantumChannel.depolarizing(1.0), qc) == pytest.approx(0.5)


# -- exponent fits ------------------------------------------------------------------------

def test_empirical_exponent_exact_line():
    ns = [1, 2, 3, 4]
    res = coding.SimulationResult(1.0, ns, [2 ** -(0.3 * n + 0.1) for n in ns], [2] * 4, 0)
    slope, resid = coding.empirical_exponent(res)
    assert slope == pytest.approx(0.3) and resid == pytest.approx(0.0, abs=1e-12)
    assert res.intercept == pytest.approx(0.1)
    assert res.per_blocklength_exponents()[0] == pytest.approx(0.4)


def test_empirical_exponent_needs_three_points():
    res = coding.SimulationResult(1.0, [1, 2, 3], [0.5, 0.25, 0.0], [2] * 3, 0)
    with pytest.warns(RuntimeWarning), pytest.raises(InvariantError):
        coding.empirical_exponent(res)


def test_simulate_records_fit():
    res = coding.simulate(ops.QuantumChannel.depolarizing(0.1), 1.8, [1, 2, 3, 4], seed=2)
    assert len(res.success) == 4 and math.isfinite(res.slope)
    again = coding.simulate(ops.QuantumChannel.depolarizing(0.1), 1.8, [1, 2, 3, 4], seed=2)
    assert res.success == again.success
