import math

import numpy as np
import pytest

from povm_realism import states
from povm_realism.errors import DimensionError, NotAStateError


def test_product_zero_hilbert_schmidt_form():
    ket = np.array([1, 0, 0, 0], dtype=complex)
    st = states.from_density_matrix(np.outer(ket, ket))
    assert np.allclose(st.rvec, [0, 0, 1])
    assert np.allclose(st.svec, [0, 0, 1])
    assert np.allclose(st.tmat, np.diag([0, 0, 1]))
    assert np.allclose(states.product_zero().rho, np.outer(ket, ket))


def test_singlet_by_hand():
    psi = np.array([0, 1, -1, 0]) / math.sqrt(2)
    st = states.from_density_matrix(np.outer(psi, psi))
    assert np.allclose(st.tmat, -np.eye(3))
    h = states.horodecki(st)
    assert h.m_value == pytest.approx(2.0)
    assert h.s_norm == pytest.approx(0.0)


def test_not_a_state():
    with pytest.raises(NotAStateError):
        states.from_hilbert_schmidt([0, 0, 0], [0, 0, 0], np.diag([-1, -1, 1]))


def test_bad_inputs():
    with pytest.raises(DimensionError):
        states.from_hilbert_schmidt([0, 0], [0, 0, 0], np.eye(3))
    with pytest.raises(NotAStateError):
        states.from_density_matrix(np.eye(4))  # trace 4
    with pytest.raises(NotAStateError):
        states.QubitState(1.5)


def test_round_trip(rng):
    for _ in range(50):
        st = states.random_state(rng)
        back = states.TwoQubitState.from_dict(st.to_dict())
        assert np.allclose(back.rho, st.rho, atol=1e-12)


def test_random_state_is_seeded():
    a, b = states.random_state(7), states.random_state(7)
    assert np.array_equal(a.rho, b.rho)


def test_purity_mean():
    # Hilbert-Schmidt measure on 4x4 density matrices: E[Tr rho^2] = 8/17
    sample = states.random_states(10_000, seed=3)
    mean = np.mean([states.purity(s) for s in sample])
    assert mean == pytest.approx(8 / 17, abs=5e-3)


def test_m_invariant_under_local_unitaries(rng):
    for _ in range(30):
        st = states.random_state(rng)
        moved = states.apply_local_unitaries(st, states.random_unitary(rng), states.random_unitary(rng))
        assert states.horodecki(moved).m_value == pytest.approx(states.horodecki(st).m_value, abs=1e-10)
        assert states.horodecki(moved).s_norm == pytest.approx(states.horodecki(st).s_norm, abs=1e-10)


def test_haar_unitary(rng):
    u = states.random_unitary(rng)
    assert np.allclose(u @ u.conj().T, np.eye(2))


def test_werner_m():
    assert states.horodecki(states.werner(0.5)).m_value == pytest.approx(0.5)


def test_qubit_state_bloch():
    q = states.QubitState(1.0, math.pi / 2, 3 * math.pi / 2)
    assert np.allclose(q.bloch, [0, -1, 0], atol=1e-15)
    assert np.trace(q.rho).real == pytest.approx(1)
