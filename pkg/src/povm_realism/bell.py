"""CHSH with a biased unsharp POVM on Alice's side and projective measurements on Bob's.

Alice's observable for direction ``a`` is ``E+ - E- = lam a.sigma + gamma I``, so
every correlator picks up a bias term ``gamma <b.s>``:

    <B> = lam [ (a, T b) + (a, T b') + (a', T b) - (a', T b') ] + 2 gamma (b . s)

The closed-form maximum returned by :func:`chsh_analytic_max` is
``2 lam sqrt(M) + 2 |gamma| |s|``. It always bounds the true maximum from
above. It is attained when ``gamma = 0`` or ``s = 0``, and otherwise only when
some frame of the top eigen-plane of ``T^t T`` balances ``|Tc| : |Tc'|``
against ``|s.c| : |s.c'|``. The optimizer in
:func:`chsh_numeric_max` is an independent check that searches all eight
setting angles; :func:`chsh_exact_max` solves the reduced three-angle problem
left once Alice's directions are optimized out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.spatial.transform import Rotation

from .errors import CounterexampleError, DimensionError
from .povm import check_params, effects
from .qmat import dot_sigma, is_unit, tensor
from .states import TwoQubitState, horodecki, random_state

CONSISTENCY_TOL = 1e-10
DEFAULT_STARTS = 32
MIN_BUDGET = 1000


@dataclass(frozen=True, eq=False)
class ChshSettings:
    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            v = np.array(getattr(self, name), dtype=float)
            if v.shape != (3,) or not is_unit(v):
                raise DimensionError(f"setting {name} must be a unit 3-vector, got {v}")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @classmethod
    def from_angles(cls, x) -> "ChshSettings":
        return cls(*(_polar(x[2 * k], x[2 * k + 1]) for k in range(4)))

    def to_dict(self) -> dict:
        return {k: [float(c) for c in getattr(self, k)] for k in ("a", "a_prime", "b", "b_prime")}


@dataclass(frozen=True)
class ChshResult:
    value: float
    settings: ChshSettings | None
    analytic: bool
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "analytic": self.analytic,
            "evaluations": self.evaluations,
            "settings": None if self.settings is None else self.settings.to_dict(),
        }


def _polar(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def _correlator_value(tmat, svec, lam, gamma, a, a2, b, b2) -> float:
    return float(
        lam * (a @ tmat @ b + a @ tmat @ b2 + a2 @ tmat @ b - a2 @ tmat @ b2) + 2 * gamma * (b @ svec)
    )


def bell_operator(lam: float, gamma: float, settings: ChshSettings) -> np.ndarray:
    """4x4 CHSH operator ``A(B + B') + A'(B - B')`` with biased unsharp effects for A, A'."""
    obs_a = effects(lam, gamma, settings.a).observable
    obs_a2 = effects(lam, gamma, settings.a_prime).observable
    obs_b, obs_b2 = dot_sigma(settings.b), dot_sigma(settings.b_prime)
    return tensor(obs_a, obs_b + obs_b2) + tensor(obs_a2, obs_b - obs_b2)


def chsh_expectation(state: TwoQubitState, lam: float, gamma: float, settings: ChshSettings) -> float:
    """CHSH expectation from the Hilbert-Schmidt correlators.

    The same number is recomputed as ``Tr(rho B)`` with the explicit 4x4 Bell
    operator; a disagreement above 1e-10 raises ``ArithmeticError``.
    """
    check_params(lam, gamma)
    via_corr = _correlator_value(
        state.tmat, state.svec, lam, gamma, settings.a, settings.a_prime, settings.b, settings.b_prime
    )
    via_trace = float(np.trace(state.rho @ bell_operator(lam, gamma, settings)).real)
    if abs(via_corr - via_trace) > CONSISTENCY_TOL:
        raise ArithmeticError(f"correlator and trace routes disagree: {via_corr!r} vs {via_trace!r}")
    return via_corr


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v) > 1e-12))
    return -v if v[k] < 0 else v


def _frame_settings(state: TwoQubitState, lam: float, gamma: float, c: np.ndarray, c2: np.ndarray) -> ChshSettings:
    """Optimal settings for ``b +/- b'`` along the orthonormal pair ``c, c'``.

    ``b, b' = cos(t) c +/- sin(t) c'`` with ``t`` in closed form, and Alice's
    axes along ``T c`` and ``T c'`` (``z`` if that vector vanishes).
    """
    t, s = state.tmat, state.svec
    # sign of c, c' is free in the lam-term; align it with the bias term
    if gamma * (s @ c) < 0:
        c = -c
    if gamma * (s @ c2) < 0:
        c2 = -c2
    tc, tc2 = t @ c, t @ c2
    x = lam * np.linalg.norm(tc) + gamma * (s @ c)
    y = lam * np.linalg.norm(tc2) + gamma * (s @ c2)
    theta = math.atan2(y, x) if (x, y) != (0.0, 0.0) else 0.0
    z = np.array([0.0, 0.0, 1.0])

    def _dir(u):
        n = np.linalg.norm(u)
        return u / n if n > 1e-14 else z

    return ChshSettings(
        _dir(tc),
        _dir(tc2),
        math.cos(theta) * c + math.sin(theta) * c2,
        math.cos(theta) * c - math.sin(theta) * c2,
    )


def analytic_settings(state: TwoQubitState, lam: float, gamma: float) -> ChshSettings:
    """Settings built in the plane of the top-2 eigenvectors ``c, c'`` of ``T^t T``.

    With no bias (or ``s = 0``) any frame of that plane is optimal and the
    eigenvectors themselves are used. Otherwise the frame is rotated within
    the plane to the best angle, which attains ``2 lam sqrt(M) + 2|gamma||s|``
    whenever some in-plane frame can.
    """
    t, s = state.tmat, state.svec
    w, v = np.linalg.eigh(t.T @ t)
    order = np.lexsort((np.arange(3), -np.round(w, 12)))
    c0, c20 = (_canonical_sign(v[:, k]) for k in order[:2])

    def frame(phi):
        return math.cos(phi) * c0 + math.sin(phi) * c20, -math.sin(phi) * c0 + math.cos(phi) * c20

    def neg(phi):
        return -reduced_objective(state, lam, gamma, *frame(phi))

    # swapping c and c' leaves the objective unchanged, so pi/2 is a full period
    grid = np.linspace(0.0, math.pi / 2, 181)
    vals = [neg(phi) for phi in grid]
    k = int(np.argmin(vals))
    h = grid[1]
    res = minimize_scalar(neg, bounds=(grid[k] - h, grid[k] + h), method="bounded", options={"xatol": 1e-12})
    phi = float(res.x) if res.fun < vals[0] - 1e-15 else 0.0
    return _frame_settings(state, lam, gamma, *frame(phi))


def chsh_analytic_max(state: TwoQubitState, lam: float, gamma: float) -> ChshResult:
    """``2 lam sqrt(M(rho)) + 2 |gamma| |s|`` with the constructed arg-max settings."""
    check_params(lam, gamma)
    h = horodecki(state)
    value = 2 * lam * math.sqrt(h.m_value) + 2 * abs(gamma) * h.s_norm
    return ChshResult(value, analytic_settings(state, lam, gamma), analytic=True)


def chsh_numeric_max(
    state: TwoQubitState,
    lam: float,
    gamma: float,
    budget: int = 10_000,
    seed: int = 0,
    starts: int = DEFAULT_STARTS,
) -> ChshResult:
    """Multi-start Nelder-Mead over the eight polar angles of ``a, a', b, b'``.

    Half of ``budget`` (objective evaluations) is spread over ``starts``
    random initial points; the rest polishes the best point with restarts.
    """
    check_params(lam, gamma)
    if budget < MIN_BUDGET:
        raise ValueError(f"budget must be >= {MIN_BUDGET}, got {budget}")
    t = np.asarray(state.tmat, dtype=float)
    s = np.asarray(state.svec, dtype=float)
    calls = 0

    def neg(x):
        nonlocal calls
        calls += 1
        sa, ca = math.sin(x[0]), math.cos(x[0])
        a = (sa * math.cos(x[1]), sa * math.sin(x[1]), ca)
        sa, ca = math.sin(x[2]), math.cos(x[2])
        a2 = (sa * math.cos(x[3]), sa * math.sin(x[3]), ca)
        sa, ca = math.sin(x[4]), math.cos(x[4])
        b = (sa * math.cos(x[5]), sa * math.sin(x[5]), ca)
        sa, ca = math.sin(x[6]), math.cos(x[6])
        b2 = (sa * math.cos(x[7]), sa * math.sin(x[7]), ca)
        bp = (b[0] + b2[0], b[1] + b2[1], b[2] + b2[2])
        bm = (b[0] - b2[0], b[1] - b2[1], b[2] - b2[2])
        corr = 0.0
        for i in range(3):
            ti = t[i]
            corr += a[i] * (ti[0] * bp[0] + ti[1] * bp[1] + ti[2] * bp[2])
            corr += a2[i] * (ti[0] * bm[0] + ti[1] * bm[1] + ti[2] * bm[2])
        return -(lam * corr + 2 * gamma * (b[0] * s[0] + b[1] * s[1] + b[2] * s[2]))

    rng = np.random.default_rng(seed)
    starts = max(1, min(starts, budget // 100))
    x0s = rng.uniform(0, 2 * np.pi, size=(starts, 8))
    per_start = (budget // 2) // starts
    results = []
    for x0 in x0s:
        res = minimize(neg, x0, method="Nelder-Mead",
                       options={"maxfev": per_start, "xatol": 1e-10, "fatol": 1e-13})
        results.append((res.fun, res.x))
    best_f, best_x = min(results, key=lambda r: r[0])
    # restarted polish on the best basin; a fresh simplex escapes NM stagnation
    while budget - calls > 50:
        res = minimize(neg, best_x, method="Nelder-Mead",
                       options={"maxfev": min(budget - calls, 2000), "xatol": 1e-12, "fatol": 1e-15,
                                "initial_simplex": best_x + 0.05 * np.vstack([np.zeros(8), np.eye(8)])})
        improved = res.fun < best_f - 1e-15
        if res.fun < best_f:
            best_f, best_x = res.fun, res.x
        if not improved:
            break
    return ChshResult(float(-best_f), ChshSettings.from_angles(best_x), analytic=False, evaluations=calls)


def reduced_objective(state: TwoQubitState, lam: float, gamma: float, c: np.ndarray, c2: np.ndarray) -> float:
    """Best CHSH value reachable with ``b +/- b'`` along the orthonormal pair ``c, c'``."""
    t, s = state.tmat, state.svec
    x = lam * np.linalg.norm(t @ c) + abs(gamma * (s @ c))
    y = lam * np.linalg.norm(t @ c2) + abs(gamma * (s @ c2))
    return 2 * math.hypot(x, y)


def chsh_exact_max(state: TwoQubitState, lam: float, gamma: float, starts: int = 16, seed: int = 0) -> ChshResult:
    """Maximum of the CHSH value with Alice's directions and the mixing angle optimized out.

    What remains is a maximization over orthonormal frames, parametrized by a
    rotation vector; multi-started from the analytic (Horodecki) frame and
    random frames. Agrees with :func:`chsh_numeric_max` but converges far
    faster, and exposes how far ``2 lam sqrt(M) + 2|gamma||s|`` overshoots.
    """
    check_params(lam, gamma)

    def neg(x):
        r = Rotation.from_rotvec(x).as_matrix()
        return -reduced_objective(state, lam, gamma, r[:, 0], r[:, 1])

    rng = np.random.default_rng(seed)
    settings0 = analytic_settings(state, lam, gamma)
    cb = settings0.b + settings0.b_prime
    frame = np.eye(3)
    if np.linalg.norm(cb) > 1e-12:
        c = cb / np.linalg.norm(cb)
        cm = settings0.b - settings0.b_prime
        c2 = cm / np.linalg.norm(cm) if np.linalg.norm(cm) > 1e-12 else np.cross(c, [1.0, 0, 0])
        frame = np.column_stack([c, c2, np.cross(c, c2)])
        if np.linalg.det(frame) < 0:
            frame[:, 2] *= -1
    seeds = [Rotation.from_matrix(frame).as_rotvec()] + list(Rotation.random(starts - 1, random_state=rng).as_rotvec())
    best = None
    for x0 in seeds:
        res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxfev": 4000})
        if best is None or res.fun < best.fun:
            best = res
    r = Rotation.from_rotvec(best.x).as_matrix()
    settings = _frame_settings(state, lam, gamma, r[:, 0], r[:, 1])
    return ChshResult(float(-best.fun), settings, analytic=False, evaluations=int(best.nfev))


def chsh_criterion(state: TwoQubitState, lam: float, gamma: float) -> float:
    h = horodecki(state)
    return lam * math.sqrt(h.m_value) + abs(gamma) * h.s_norm


def violates_chsh(state: TwoQubitState, lam: float, gamma: float) -> tuple[float, bool]:
    """``(A, A > 1)`` with ``A = lam sqrt(M(rho)) + |gamma| |s|``.

    ``A <= 1`` certifies that no settings violate CHSH. Because the closed
    form only bounds the maximum from above, ``A > 1`` is exact when ``s``
    is compatible with ``T`` (e.g. ``gamma = 0`` or ``s = 0``).
    """
    check_params(lam, gamma)
    a = chsh_criterion(state, lam, gamma)
    return a, a > 1


# ---------------------------------------------------------------------------
# randomized check that POVMs on one side never enable a violation that
# projective measurements on both sides cannot produce


CASE_NAMES = (
    "lambda+gamma=1, gamma>0",
    "lambda+gamma<1, gamma>0",
    "lambda-gamma=1, gamma<=0",
    "lambda-gamma<1, gamma<=0",
)


@dataclass
class CorollaryReport:
    samples: int = 0
    filtered: int = 0
    cells: int = 0
    counterexamples: int = 0
    max_criterion: float | None = None
    case_counts: dict = field(default_factory=lambda: {name: 0 for name in CASE_NAMES})

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "filtered": self.filtered,
            "cells": self.cells,
            "counterexamples": self.counterexamples,
            "max_criterion": self.max_criterion,
            "case_counts": dict(self.case_counts),
        }


def triangle_points(step: float = 0.01, boundary_points: int = 1001) -> tuple[np.ndarray, np.ndarray]:
    """Grid over ``lam >= 0, |lam| + |gamma| <= 1`` plus a dense sampling of the slanted edges."""
    n = int(round(1 / step))
    if not math.isclose(n * step, 1.0, rel_tol=0, abs_tol=1e-12):
        raise ValueError(f"step must divide 1, got {step}")
    i, j = np.meshgrid(np.arange(n + 1), np.arange(-n, n + 1), indexing="ij")
    keep = i + np.abs(j) <= n
    lam, gam = i[keep] / n, j[keep] / n
    edge = np.linspace(0.0, 1.0, boundary_points)
    lam = np.concatenate([lam, edge, edge])
    gam = np.concatenate([gam, 1.0 - edge, edge - 1.0])
    return lam, gam


def classify_cases(lam: np.ndarray, gam: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    pos = gam > 0
    on_plus = np.abs(lam + gam - 1) <= tol
    on_minus = np.abs(lam - gam - 1) <= tol
    return np.where(pos, np.where(on_plus, 0, 1), np.where(on_minus, 2, 3))


def verify_corollary(sample_count: int, seed: int = 0, step: float = 0.01, chunk: int = 512) -> CorollaryReport:
    """Scan random states with ``M(rho) <= 1`` over the validity triangle.

    Raises :class:`CounterexampleError` if any cell has ``A > 1 + 1e-10``.
    """
    report = CorollaryReport(samples=sample_count)
    if sample_count <= 0:
        return report
    lam, gam = triangle_points(step)
    cases = np.bincount(classify_cases(lam, gam), minlength=4)
    rng = np.random.default_rng(seed)
    kept: list[TwoQubitState] = []
    root_m, s_norm = [], []
    for _ in range(sample_count):
        st = random_state(rng)
        h = horodecki(st)
        if h.m_value <= 1:
            kept.append(st)
            root_m.append(math.sqrt(h.m_value))
            s_norm.append(h.s_norm)
    root_m, s_norm = np.array(root_m), np.array(s_norm)
    abs_gam = np.abs(gam)
    best = -math.inf
    for lo in range(0, len(kept), chunk):
        crit = np.outer(root_m[lo:lo + chunk], lam) + np.outer(s_norm[lo:lo + chunk], abs_gam)
        worst = np.unravel_index(np.argmax(crit), crit.shape)
        if crit[worst] > 1 + 1e-10:
            st = kept[lo + worst[0]]
            raise CounterexampleError(
                f"criterion {crit[worst]!r} > 1 with M <= 1",
                {"state": st.to_dict(), "lambda": float(lam[worst[1]]), "gamma": float(gam[worst[1]]),
                 "criterion": float(crit[worst])},
            )
        best = max(best, float(crit[worst]))
    report.filtered = len(kept)
    report.cells = len(kept) * lam.size
    report.max_criterion = best if kept else None
    report.case_counts = {name: int(c) * len(kept) for name, c in zip(CASE_NAMES, cases)}
    return report
