"""Invariant suites runnable without pytest (``povm-realism selftest``)."""

from __future__ import annotations

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from . import bell, macroreal as mr, povm, qmat, states


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.passed + len(self.failures)

    def check(self, ok: bool, label: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failures.append(label)


def _random_params(rng):
    lam = rng.uniform(0, 1)
    return lam, rng.uniform(-(1 - lam), 1 - lam)


def suite_pauli(rng) -> SuiteResult:
    res = SuiteResult("pauli-algebra")
    eps = np.zeros((3, 3, 3))
    for i, j, k in itertools.permutations(range(3)):
        eps[i, j, k] = np.linalg.det(np.eye(3)[[i, j, k]])
    for i, j in itertools.product(range(3), repeat=2):
        expect = (i == j) * qmat.I2 + 1j * sum(eps[i, j, k] * qmat.PAULIS[k] for k in range(3))
        res.check(np.array_equal(qmat.multiply(qmat.PAULIS[i], qmat.PAULIS[j]), expect), f"sigma{i} sigma{j}")
    for _ in range(20):
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        m = m + m.conj().T
        w, v = qmat.hermitian_eigen(m)
        res.check(abs(w.sum() - np.trace(m).real) < 1e-10, "eigenvalue sum")
        res.check(np.max(np.abs(m - (v * w) @ v.conj().T)) < 1e-10, "reconstruction")
        p = m @ m
        r = qmat.psd_sqrt(p)
        res.check(np.max(np.abs(r @ r - p)) < 1e-10 * max(1.0, np.max(np.abs(p))), "psd sqrt")
    return res


def suite_povm(rng) -> SuiteResult:
    res = SuiteResult("povm-completeness")
    for _ in range(200):
        lam, gamma = _random_params(rng)
        axis = qmat.unit(rng.standard_normal(3))
        eff = povm.make_effects(povm.DichotomicPovm(lam, gamma, tuple(axis)))
        res.check(np.max(np.abs(eff.e_plus + eff.e_minus - qmat.I2)) <= 1e-12, "E+ + E- = I")
        res.check(min(np.linalg.eigvalsh(eff.e_plus)[0], np.linalg.eigvalsh(eff.e_minus)[0]) >= -1e-12, "PSD")
        rho = states.QubitState(rng.uniform(0, 1), rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)).rho
        pp, pm = povm.outcome_probability(eff, rho, 1), povm.outcome_probability(eff, rho, -1)
        res.check(abs(pp + pm - 1) <= 1e-12 and -1e-12 <= pp <= 1 + 1e-12, "probabilities")
    return res


def suite_luders(rng) -> SuiteResult:
    res = SuiteResult("luders-trace-preservation")
    for _ in range(200):
        lam, gamma = _random_params(rng)
        eff = povm.effects(lam, gamma, tuple(qmat.unit(rng.standard_normal(3))))
        rho = states.QubitState(rng.uniform(0, 1), rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)).rho
        out = povm.nonselective(eff, rho)
        res.check(abs(np.trace(out).real - 1) <= 1e-12, "trace")
        res.check(np.linalg.eigvalsh(out)[0] >= -1e-12, "positivity")
    return res


def suite_states(rng) -> SuiteResult:
    res = SuiteResult("state-round-trip")
    for _ in range(100):
        st = states.random_state(rng)
        back = states.from_hilbert_schmidt(st.rvec, st.svec, st.tmat)
        res.check(np.max(np.abs(back.rho - st.rho)) <= 1e-10, "rho round trip")
        again = states.from_density_matrix(back.rho)
        res.check(
            max(np.max(np.abs(again.rvec - st.rvec)), np.max(np.abs(again.svec - st.svec)),
                np.max(np.abs(again.tmat - st.tmat))) <= 1e-10,
            "Hilbert-Schmidt round trip",
        )
        res.check(0 <= states.horodecki(st).m_value <= 2 + 1e-12, "0 <= M <= 2")
    return res


def suite_local_unitary(rng) -> SuiteResult:
    res = SuiteResult("local-unitary-invariance")
    for _ in range(100):
        st = states.random_state(rng)
        lam, gamma = _random_params(rng)
        moved = states.apply_local_unitaries(st, states.random_unitary(rng), states.random_unitary(rng))
        res.check(abs(bell.chsh_criterion(st, lam, gamma) - bell.chsh_criterion(moved, lam, gamma)) < 1e-8, "A")
    return res


def suite_closed_forms(rng) -> SuiteResult:
    res = SuiteResult("macrorealism-closed-forms")
    for _ in range(100):
        lam, gamma = _random_params(rng)
        res.check(abs(mr.klgi(*mr.LGI_OPTIMUM, lam, gamma) - mr.klgi_closed(lam, gamma)) <= 1e-10, "LGI")
        res.check(abs(mr.knsit(*mr.NSIT_OPTIMUM, lam, gamma) - mr.knsit_closed(lam, gamma)) <= 1e-10, "NSIT")
        res.check(abs(mr.kwlgi1(*mr.WLGI1_OPTIMUM, lam, gamma) - mr.kwlgi1_exact(lam, gamma)) <= 1e-10, "WLGI1")
    return res


SUITES = (suite_pauli, suite_povm, suite_luders, suite_states, suite_local_unitary, suite_closed_forms)


def run_all(seed: int = 0) -> list[SuiteResult]:
    return [suite(np.random.default_rng([seed, k])) for k, suite in enumerate(SUITES)]
