import math

import numpy as np
import pytest

from povm_realism import bell, qmat, states
from povm_realism.errors import CounterexampleError, DimensionError, InvalidPovmError

SQRT2 = math.sqrt(2)


def test_singlet_expectation_by_hand():
    # singlet: <a.sigma x b.sigma> = -a.b
    st = states.singlet()
    s = bell.ChshSettings.from_angles([0, 0, math.pi / 2, 0, 3 * math.pi / 4, math.pi, 3 * math.pi / 4, 0])
    assert bell.chsh_expectation(st, 1.0, 0.0, s) == pytest.approx(2 * SQRT2)


def test_operator_route_matches_correlators(rng):
    for _ in range(20):
        st = states.random_state(rng)
        lam = rng.uniform(0, 1)
        gamma = rng.uniform(-(1 - lam), 1 - lam)
        s = bell.ChshSettings.from_angles(rng.uniform(0, 2 * np.pi, 8))
        b = bell.bell_operator(lam, gamma, s)
        assert np.trace(st.rho @ b).real == pytest.approx(bell.chsh_expectation(st, lam, gamma, s), abs=1e-12)


def test_settings_validation():
    with pytest.raises(DimensionError):
        bell.ChshSettings([1, 1, 0], [0, 0, 1], [0, 0, 1], [0, 0, 1])


def test_analytic_singlet():
    r = bell.chsh_analytic_max(states.singlet(), 1.0, 0.0)
    assert r.value == pytest.approx(2 * SQRT2)
    assert bell.chsh_expectation(states.singlet(), 1.0, 0.0, r.settings) == pytest.approx(2 * SQRT2, abs=1e-9)


def test_analytic_settings_reproduce_value_where_tight(rng):
    # gamma = 0 or s = 0: the closed form is attained by the constructed settings
    for _ in range(30):
        st = states.random_state(rng)
        lam = rng.uniform(0, 1)
        r = bell.chsh_analytic_max(st, lam, 0.0)
        assert bell.chsh_expectation(st, lam, 0.0, r.settings) == pytest.approx(r.value, abs=1e-9)
    for p in (0.3, 0.7, 1.0):
        st = states.werner(p)
        for lam, gamma in [(0.5, 0.4), (0.2, -0.8), (1.0, 0.0)]:
            r = bell.chsh_analytic_max(st, lam, gamma)
            assert bell.chsh_expectation(st, lam, gamma, r.settings) == pytest.approx(r.value, abs=1e-9)


def test_analytic_settings_with_compatible_bias():
    # s along the top eigenvector of T^t T
    st = states.from_hilbert_schmidt([0, 0, 0.3], [0, 0, 0.3], np.diag([0.2, 0.1, 0.6]))
    for lam, gamma in [(0.6, 0.3), (0.4, -0.6)]:
        r = bell.chsh_analytic_max(st, lam, gamma)
        assert bell.chsh_expectation(st, lam, gamma, r.settings) == pytest.approx(r.value, abs=1e-9)


def test_numeric_max_singlet():
    r = bell.chsh_numeric_max(states.singlet(), 1.0, 0.0, budget=10_000, seed=1)
    assert r.value == pytest.approx(2 * SQRT2, abs=1e-6)
    assert r.evaluations <= 10_000
    assert bell.chsh_expectation(states.singlet(), 1.0, 0.0, r.settings) == pytest.approx(r.value, abs=1e-9)


def test_numeric_max_bounded_by_analytic(rng):
    for _ in range(3):
        st = states.random_state(rng)
        lam = rng.uniform(0, 1)
        gamma = rng.uniform(-(1 - lam), 1 - lam)
        num = bell.chsh_numeric_max(st, lam, gamma, seed=0).value
        ex = bell.chsh_exact_max(st, lam, gamma).value
        assert num == pytest.approx(ex, abs=1e-6)
        assert ex <= bell.chsh_analytic_max(st, lam, gamma).value + 1e-12


def test_exact_max_brute_force_oracle(rng):
    # reduced objective maximized by a dense grid of frames, for one state
    st = states.random_state(rng)
    lam, gamma = 0.4, 0.5
    ex = bell.chsh_exact_max(st, lam, gamma).value
    best = 0.0
    for th in np.linspace(0, np.pi, 61):
        for ph in np.linspace(0, 2 * np.pi, 121):
            c = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
            e1 = qmat.unit(np.cross(c, [0.3, 0.5, 0.7]))
            e2 = np.cross(c, e1)
            for psi in np.linspace(0, np.pi, 61):
                c2 = np.cos(psi) * e1 + np.sin(psi) * e2
                best = max(best, bell.reduced_objective(st, lam, gamma, c, c2))
    assert best <= ex + 1e-12
    assert ex - best < 1e-2


def test_budget_floor():
    with pytest.raises(ValueError):
        bell.chsh_numeric_max(states.singlet(), 1.0, 0.0, budget=10)


def test_criterion_and_documented_example():
    a, v = bell.violates_chsh(states.singlet(), 0.7071067811, 0.29)
    assert f"{a:.4f}" == "1.0000" and v is False
    a, v = bell.violates_chsh(states.singlet(), 0.8, 0.1)
    assert a == pytest.approx(0.8 * SQRT2) and v is True
    with pytest.raises(InvalidPovmError):
        bell.violates_chsh(states.singlet(), 0.8, 0.3)


def test_criterion_is_local_unitary_invariant(rng):
    st = states.random_state(rng)
    moved = states.apply_local_unitaries(st, states.random_unitary(rng), states.random_unitary(rng))
    assert bell.chsh_criterion(moved, 0.4, -0.3) == pytest.approx(bell.chsh_criterion(st, 0.4, -0.3), abs=1e-10)


def test_triangle_points_cover_cases():
    lam, gam = bell.triangle_points(0.1)
    assert np.all(lam + np.abs(gam) <= 1 + 1e-12)
    assert set(np.bincount(bell.classify_cases(lam, gam), minlength=4) > 0) == {True}


def test_corollary_small_and_empty():
    rep = bell.verify_corollary(200, seed=1, step=0.05)
    assert rep.counterexamples == 0 and rep.filtered > 0
    assert rep.max_criterion <= 1 + 1e-10
    assert bell.verify_corollary(0).filtered == 0


def test_counterexample_dump(monkeypatch):
    # a fake summary with |s| > 1 passes the M <= 1 filter and must be reported
    fake = type("H", (), {"m_value": 1.0, "s_norm": 2.0})()
    monkeypatch.setattr(bell, "horodecki", lambda st: fake)
    with pytest.raises(CounterexampleError) as exc:
        bell.verify_corollary(3, step=0.1)
    assert {"state", "lambda", "gamma"} <= set(exc.value.dump)
