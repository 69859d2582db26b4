"""Two-time statistics of a precessing spin-1/2 under biased unsharp sigma_z measurements.

Times ``t1, t2, t3`` are equidistant. Between neighbouring times the state is
evolved by ``exp(-i omega_dt sigma_x)``, which rotates the Bloch vector about
``x`` by ``2 omega_dt``; with this convention the projective LGI optimum
(3/2) sits at ``omega_dt = pi/6``. The initial state is the state at ``t1``.

A measurement at ``t_i`` acts through the Lüders instrument of the sigma_z
effects. Joint probabilities are computed without dividing by the
first-outcome probability, so zero-probability branches are harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import ValidationError
from .povm import EffectPair, effects, luders_unnormalized, nonselective
from .qmat import I2, SX
from .states import QubitState

OUTCOMES = (1, -1)
PAIRS = ((1, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class PrecessionSpec:
    omega_dt: float

    def __post_init__(self):
        if not 0 <= self.omega_dt < 2 * math.pi:
            raise ValidationError(f"omega_dt must lie in [0, 2pi), got {self.omega_dt}")

    @property
    def step(self) -> np.ndarray:
        return math.cos(self.omega_dt) * I2 - 1j * math.sin(self.omega_dt) * SX

    @property
    def rotation_angle(self) -> float:
        return 2 * self.omega_dt


@dataclass(frozen=True)
class SequentialStats:
    joint: dict  # {(i, j): {(m_i, m_j): p}}
    single: dict  # {(t, m): p} with no earlier measurement

    def p(self, i: int, mi: int, j: int, mj: int) -> float:
        return self.joint[(i, j)][(mi, mj)]

    def correlator(self, i: int, j: int) -> float:
        return sum(mi * mj * p for (mi, mj), p in self.joint[(i, j)].items())


@dataclass(frozen=True)
class MrScores:
    k_lgi: float
    k_wlgi1: float
    k_wlgi2: float
    k_nsit: float

    def to_dict(self) -> dict:
        return {"k_lgi": self.k_lgi, "k_wlgi1": self.k_wlgi1, "k_wlgi2": self.k_wlgi2, "k_nsit": self.k_nsit}


def _evolve(rho: np.ndarray, u: np.ndarray, steps: int) -> np.ndarray:
    for _ in range(steps):
        rho = u @ rho @ u.conj().T
    return rho


def _joint(rho1: np.ndarray, u: np.ndarray, eff: EffectPair, i: int, j: int) -> dict:
    if not (1 <= i < j <= 3):
        raise ValidationError(f"need 1 <= i < j <= 3, got ({i}, {j})")
    rho_i = _evolve(rho1, u, i - 1)
    out = {}
    for mi in OUTCOMES:
        branch = _evolve(luders_unnormalized(eff, rho_i, mi), u, j - i)
        for mj in OUTCOMES:
            out[(mi, mj)] = float(np.trace(branch @ eff.effect(mj)).real)
    return out


def sequential_joint(initial: QubitState, spec: PrecessionSpec, lam: float, gamma: float, i: int, j: int) -> dict:
    """Joint distribution ``{(m_i, m_j): p}`` of sigma_z outcomes at times ``t_i < t_j``."""
    return _joint(initial.rho, spec.step, effects(lam, gamma), i, j)


def sequential_stats(initial: QubitState, spec: PrecessionSpec, lam: float, gamma: float) -> SequentialStats:
    eff = effects(lam, gamma)
    u = spec.step
    rho = initial.rho
    joint = {pair: _joint(rho, u, eff, *pair) for pair in PAIRS}
    single = {}
    for t in (1, 2, 3):
        rt = _evolve(rho, u, t - 1)
        for m in OUTCOMES:
            single[(t, m)] = float(np.trace(rt @ eff.effect(m)).real)
    return SequentialStats(joint, single)


def disturbed_marginal(initial: QubitState, spec: PrecessionSpec, lam: float, gamma: float, i: int, j: int) -> dict:
    """Outcome distribution at ``t_j`` after a non-selective measurement at ``t_i``."""
    eff = effects(lam, gamma)
    u = spec.step
    rho = _evolve(initial.rho, u, i - 1)
    rho = _evolve(nonselective(eff, rho), u, j - i)
    return {m: float(np.trace(rho @ eff.effect(m)).real) for m in OUTCOMES}


def scores_from_stats(st: SequentialStats) -> MrScores:
    p = st.p
    return MrScores(
        k_lgi=st.correlator(1, 2) + st.correlator(2, 3) - st.correlator(1, 3),
        k_wlgi1=p(2, 1, 3, 1) - p(1, -1, 2, 1) - p(1, 1, 3, 1),
        k_wlgi2=p(2, -1, 3, -1) - p(1, 1, 2, -1) - p(1, -1, 3, -1),
        k_nsit=p(1, -1, 2, 1) + p(1, 1, 2, 1) - st.single[(2, 1)],
    )


def mr_scores(initial: QubitState, spec: PrecessionSpec, lam: float, gamma: float) -> MrScores:
    return scores_from_stats(sequential_stats(initial, spec, lam, gamma))


def klgi(initial: QubitState, spec: PrecessionSpec, lam: float, gamma: float) -> float:
    """``C12 + C23 - C13``; classical bound 1."""
    return mr_scores(initial, spec, lam, gamma).k_lgi


def kwlgi1(initial: QubitState, spec: PrecessionSpec, lam: float, gamma: float) -> float:
    """``p(Q2=+,Q3=+) - p(Q1=-,Q2=+) - p(Q1=+,Q3=+)``; classical bound 0."""
    return mr_scores(initial, spec, lam, gamma).k_wlgi1


def kwlgi2(initial: QubitState, spec: PrecessionSpec, lam: float, gamma: float) -> float:
    """``p(Q2=-,Q3=-) - p(Q1=+,Q2=-) - p(Q1=-,Q3=-)``; classical bound 0."""
    return mr_scores(initial, spec, lam, gamma).k_wlgi2


def knsit(initial: QubitState, spec: PrecessionSpec, lam: float, gamma: float) -> float:
    """Change of ``p(Q2=+)`` caused by a non-selective measurement at ``t1``; zero classically."""
    return mr_scores(initial, spec, lam, gamma).k_nsit


def mirrored(state: QubitState) -> QubitState:
    """Conjugate by sigma_x: ``(x, y, z) -> (x, -y, -z)``.

    This commutes with the precession and swaps the sigma_z outcomes, so it
    maps the WLGI1 scenario at bias ``gamma`` onto WLGI2 at ``-gamma``.
    """
    return QubitState(state.r, math.pi - state.theta, (2 * math.pi - state.phi) % (2 * math.pi))


# optimal scenarios (initial state at t1, omega_dt)
LGI_OPTIMUM = (QubitState(0.0), PrecessionSpec(math.pi / 6))
WLGI1_OPTIMUM = (QubitState(1.0, math.pi / 3, math.pi / 2), PrecessionSpec(0.56))
WLGI2_OPTIMUM = (mirrored(WLGI1_OPTIMUM[0]), PrecessionSpec(0.56))
NSIT_OPTIMUM = (QubitState(1.0, math.pi / 2, 3 * math.pi / 2), PrecessionSpec(math.pi / 4))


# closed forms ---------------------------------------------------------------


def _radicals(lam: float, gamma: float) -> tuple[float, float]:
    """``sqrt(1-g-l) sqrt(1-g+l)`` and ``sqrt(1+g-l) sqrt(1+g+l)``, clamped at the triangle edge."""
    r_minus = math.sqrt(max(1 - gamma - lam, 0.0)) * math.sqrt(max(1 - gamma + lam, 0.0))
    r_plus = math.sqrt(max(1 + gamma - lam, 0.0)) * math.sqrt(max(1 + gamma + lam, 0.0))
    return r_minus, r_plus


def klgi_closed(lam: float, gamma: float) -> float:
    """K_LGI for the maximally mixed start at ``omega_dt = pi/6``."""
    return 1.5 * lam**2 + gamma**2


def knsit_closed(lam: float, gamma: float) -> float:
    """K_NSIT at the NSIT-optimal state and ``omega_dt = pi/4``."""
    r_minus, r_plus = _radicals(lam, gamma)
    return lam / 4 * (2 - r_minus - r_plus)


def kwlgi1_printed(lam: float, gamma: float) -> float:
    """K_WLGI1 at the WLGI1 optimum with two-digit coefficients (0.61, 0.12, 0.19)."""
    r_minus, r_plus = _radicals(lam, gamma)
    return -0.25 + (gamma / 2 + 0.61 * lam) ** 2 - 0.12 * lam * gamma + 0.19 * lam * (2 - r_minus - r_plus)


def kwlgi1_exact(lam: float, gamma: float, initial: QubitState = WLGI1_OPTIMUM[0],
                 spec: PrecessionSpec = WLGI1_OPTIMUM[1]) -> float:
    """Exact K_WLGI1 for any initial state; only the y and z Bloch components enter.

    With rotation angle ``a = 2 omega_dt`` and the radicals ``R-``, ``R+`` of
    :func:`kwlgi1_printed`::

        K = (g^2 - 1)/4 + l^2 (cos a / 2 - cos 2a / 4)
            + l g [y (sin a / 4 + sin 2a / 8) + z (cos a / 2 - cos 2a / 8 + 1/8)]
            + l y [(1 - R-) sin a / 4 + (1 - R+) sin 2a / 8]
            + l z (1 - R+)(1 - cos 2a) / 8

    At the WLGI1 optimum this reads ``-1/4 + g^2/4 + 0.37293 l^2 + 0.48998 l g
    + l (0.38105 - 0.19488 R- - 0.18618 R+)``.
    """
    _, y, z = initial.bloch
    a = spec.rotation_angle
    r_minus, r_plus = _radicals(lam, gamma)
    s1, s2, c1, c2 = math.sin(a), math.sin(2 * a), math.cos(a), math.cos(2 * a)
    return (
        (gamma**2 - 1) / 4
        + lam**2 * (c1 / 2 - c2 / 4)
        + lam * gamma * (y * (s1 / 4 + s2 / 8) + z * (c1 / 2 - c2 / 8 + 1 / 8))
        + lam * y * ((1 - r_minus) * s1 / 4 + (1 - r_plus) * s2 / 8)
        + lam * z * (1 - r_plus) * (1 - c2) / 8
    )
