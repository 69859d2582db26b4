"""Biased unsharp two-outcome POVMs and their Lüders instrument.

For a measurement direction ``n`` with sharp projectors ``P± = (I ± n.sigma)/2``
the effects are

    E± = lam * P± + (1 ± gamma - lam)/2 * I

which are valid effects iff ``|lam| + |gamma| <= 1``. ``lam`` is the
sharpness, ``gamma`` the bias; ``lam=1, gamma=0`` is the projective case.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConditioningError, InvalidPovmError
from .qmat import I2, dot_sigma, is_unit

VALIDITY_TOL = 1e-12
MIN_PROBABILITY = 1e-14
Z_AXIS = (0.0, 0.0, 1.0)


def check_params(lam: float, gamma: float, allow_negative_lambda: bool = False) -> None:
    """Raise :class:`InvalidPovmError` unless ``(lam, gamma)`` lies in the validity triangle."""
    if not (np.isfinite(lam) and np.isfinite(gamma)):
        raise InvalidPovmError("lambda and gamma must be finite")
    if lam < 0 and not allow_negative_lambda:
        raise InvalidPovmError(f"lambda must be >= 0, got {lam}")
    if abs(lam) + abs(gamma) > 1 + VALIDITY_TOL:
        raise InvalidPovmError(
            f"|lambda|+|gamma| must be <= 1, got |{lam}|+|{gamma}| = {abs(lam) + abs(gamma)!r}"
        )


@dataclass(frozen=True)
class DichotomicPovm:
    lam: float
    gamma: float = 0.0
    axis: tuple[float, float, float] = Z_AXIS
    # negative sharpness is unphysical but kept reachable for the sign-symmetry remark
    allow_negative_lambda: bool = field(default=False, compare=False)

    def __post_init__(self):
        check_params(self.lam, self.gamma, self.allow_negative_lambda)
        axis = tuple(float(x) for x in self.axis)
        if len(axis) != 3 or not is_unit(axis):
            raise InvalidPovmError(f"axis must be a unit 3-vector, got {self.axis}")
        object.__setattr__(self, "axis", axis)

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "gamma": self.gamma, "axis": list(self.axis)}

    @classmethod
    def from_dict(cls, d: dict) -> "DichotomicPovm":
        return cls(float(d["lambda"]), float(d["gamma"]), tuple(d.get("axis", Z_AXIS)))


@dataclass(frozen=True, eq=False)
class EffectPair:
    e_plus: np.ndarray
    e_minus: np.ndarray
    sqrt_plus: np.ndarray
    sqrt_minus: np.ndarray

    def effect(self, outcome: int) -> np.ndarray:
        return self.e_plus if _sign(outcome) > 0 else self.e_minus

    def root(self, outcome: int) -> np.ndarray:
        return self.sqrt_plus if _sign(outcome) > 0 else self.sqrt_minus

    @property
    def observable(self) -> np.ndarray:
        """``E+ - E- = lam n.sigma + gamma I``, the +/-1 valued observable."""
        return self.e_plus - self.e_minus


def _sign(outcome: int) -> int:
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    return outcome


def make_effects(p: DichotomicPovm) -> EffectPair:
    ns = dot_sigma(p.axis)
    p_up, p_down = (I2 + ns) / 2, (I2 - ns) / 2
    lam, g = p.lam, p.gamma
    # spectral form; square roots taken of the same scalars so edge-of-triangle
    # zeros stay exact (sqrt amplifies 1e-16 rounding to 1e-8)
    plus = ((1 + g + lam) / 2, (1 + g - lam) / 2)
    minus = ((1 - g - lam) / 2, (1 - g + lam) / 2)
    roots = [tuple(np.sqrt(max(x, 0.0)) for x in pair) for pair in (plus, minus)]
    mats = [
        plus[0] * p_up + plus[1] * p_down,
        minus[0] * p_up + minus[1] * p_down,
        roots[0][0] * p_up + roots[0][1] * p_down,
        roots[1][0] * p_up + roots[1][1] * p_down,
    ]
    for m in mats:
        m.setflags(write=False)
    return EffectPair(*mats)


def effects(lam: float, gamma: float, axis=Z_AXIS) -> EffectPair:
    return make_effects(DichotomicPovm(lam, gamma, axis))


def outcome_probability(eff: EffectPair, rho: np.ndarray, outcome: int) -> float:
    """Born rule ``Tr(rho E_outcome)``."""
    return float(np.trace(rho @ eff.effect(outcome)).real)


def luders_update(eff: EffectPair, rho: np.ndarray, outcome: int) -> tuple[np.ndarray, float]:
    """Post-measurement state ``sqrt(E) rho sqrt(E) / p`` and the outcome probability ``p``."""
    p = outcome_probability(eff, rho, outcome)
    if p <= MIN_PROBABILITY:
        raise ConditioningError(f"cannot condition on outcome {outcome:+d} with probability {p:.3e}")
    k = eff.root(outcome)
    post = k @ rho @ k
    return post / p, p


def luders_unnormalized(eff: EffectPair, rho: np.ndarray, outcome: int) -> np.ndarray:
    """``sqrt(E) rho sqrt(E)``; its trace is the outcome probability. Never raises."""
    k = eff.root(outcome)
    return k @ rho @ k


def nonselective(eff: EffectPair, rho: np.ndarray) -> np.ndarray:
    return luders_unnormalized(eff, rho, 1) + luders_unnormalized(eff, rho, -1)
