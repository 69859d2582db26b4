"""Violation regions over the (lambda, gamma) validity triangle and sharpness thresholds."""

from __future__ import annotations

from dataclasses import dataclass, field
import csv
import enum
import io
import json
import math
from pathlib import Path

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from . import macroreal as mr
from .bell import chsh_criterion
from .errors import ValidationError
from .povm import VALIDITY_TOL, check_params
from .states import QubitState, TwoQubitState, singlet
from .macroreal import PrecessionSpec

# strict inequalities; the guard keeps boundary cells (exactly at the bound
# up to rounding) from being reported as violations
VIOLATION_GUARD = 1e-12
BISECT_XTOL = 1e-13
SCAN_POINTS = 201


class Quantity(str, enum.Enum):
    CHSH = "chsh"
    LGI = "lgi"
    WLGI1 = "wlgi1"
    WLGI2 = "wlgi2"
    NSIT = "nsit"

    @property
    def bound(self) -> float:
        return {"chsh": 2.0, "lgi": 1.0}.get(self.value, 0.0)

    @classmethod
    def parse(cls, name) -> "Quantity":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValidationError(
                f"unknown quantity {name!r}; expected one of {', '.join(q.value for q in cls)}"
            ) from None


@dataclass(frozen=True, eq=False)
class Scenario:
    """Fixed state (and time step) at which a quantity is evaluated."""

    quantity: Quantity
    initial: QubitState | None = None
    spec: PrecessionSpec | None = None
    pair_state: TwoQubitState | None = None

    def evaluate(self, lam: float, gamma: float) -> float:
        q = self.quantity
        if q is Quantity.CHSH:
            check_params(lam, gamma)
            return 2 * chsh_criterion(self.pair_state, lam, gamma)
        scores = mr.mr_scores(self.initial, self.spec, lam, gamma)
        return {
            Quantity.LGI: scores.k_lgi,
            Quantity.WLGI1: scores.k_wlgi1,
            Quantity.WLGI2: scores.k_wlgi2,
            Quantity.NSIT: scores.k_nsit,
        }[q]

    def margin(self, lam: float, gamma: float) -> float:
        return self.evaluate(lam, gamma) - self.quantity.bound - VIOLATION_GUARD

    def violated(self, lam: float, gamma: float) -> bool:
        return self.margin(lam, gamma) > 0

    def to_dict(self) -> dict:
        d = {"quantity": self.quantity.value}
        if self.pair_state is not None:
            d["state"] = self.pair_state.to_dict()
        if self.initial is not None:
            d.update(r=self.initial.r, theta=self.initial.theta, phi=self.initial.phi,
                     omega_dt=self.spec.omega_dt)
        return d


_OPTIMA = {
    Quantity.LGI: mr.LGI_OPTIMUM,
    Quantity.WLGI1: mr.WLGI1_OPTIMUM,
    Quantity.WLGI2: mr.WLGI2_OPTIMUM,
    Quantity.NSIT: mr.NSIT_OPTIMUM,
}


def default_scenario(quantity, pair_state: TwoQubitState | None = None) -> Scenario:
    """Optimal state/time per quantity; CHSH defaults to the singlet.

    WLGI2 uses the sigma_x-mirror of the WLGI1 optimum.
    """
    q = Quantity.parse(quantity)
    if q is Quantity.CHSH:
        return Scenario(q, pair_state=pair_state if pair_state is not None else singlet())
    initial, spec = _OPTIMA[q]
    return Scenario(q, initial, spec)


@dataclass(eq=False)
class RegionGrid:
    quantity: Quantity
    step: float
    lambda_axis: np.ndarray
    gamma_axis: np.ndarray
    valid: np.ndarray  # [gamma, lambda]
    values: np.ndarray  # nan outside the triangle
    violated: np.ndarray
    scenario: dict = field(default_factory=dict)

    def cell(self, lam: float, gamma: float) -> tuple[bool, float | None, bool]:
        i = int(np.argmin(np.abs(self.lambda_axis - lam)))
        j = int(np.argmin(np.abs(self.gamma_axis - gamma)))
        v = self.values[j, i]
        return bool(self.valid[j, i]), (None if np.isnan(v) else float(v)), bool(self.violated[j, i])

    def rows(self):
        """``(lambda, gamma, valid, value, violated)``, gamma-major then lambda."""
        for j, g in enumerate(self.gamma_axis):
            for i, lam in enumerate(self.lambda_axis):
                v = self.values[j, i]
                yield (float(lam), float(g), bool(self.valid[j, i]),
                       None if np.isnan(v) else float(v), bool(self.violated[j, i]))


def _axis(lo_steps: int, hi_steps: int, step: float) -> np.ndarray:
    return np.round(np.arange(lo_steps, hi_steps + 1) * step, 12) + 0.0


def sweep_region(quantity, scenario: Scenario | None = None, step: float = 0.01) -> RegionGrid:
    q = Quantity.parse(quantity)
    if not 0 < step <= 0.1:
        raise ValidationError(f"grid step must lie in (0, 0.1], got {step}")
    scenario = scenario or default_scenario(q)
    if scenario.quantity is not q:
        raise ValidationError(f"scenario is for {scenario.quantity.value}, not {q.value}")
    n = int(math.floor(1 / step + 1e-9))
    lam_axis, gam_axis = _axis(0, n, step), _axis(-n, n, step)
    lam_grid, gam_grid = np.meshgrid(lam_axis, gam_axis)
    valid = lam_grid + np.abs(gam_grid) <= 1 + VALIDITY_TOL
    values = np.full(valid.shape, np.nan)
    for j, i in zip(*np.nonzero(valid)):
        values[j, i] = scenario.evaluate(lam_axis[i], gam_axis[j])
    with np.errstate(invalid="ignore"):
        violated = valid & (values - q.bound > VIOLATION_GUARD)
    return RegionGrid(q, step, lam_axis, gam_axis, valid, values, violated, scenario.to_dict())


# thresholds -----------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdPoint:
    gamma: float
    lambda_star: float | None
    monotone: bool = True


@dataclass(eq=False)
class ThresholdCurve:
    quantity: Quantity
    points: list[ThresholdPoint]
    scenario: dict = field(default_factory=dict)

    @property
    def gammas(self) -> list[float]:
        return [p.gamma for p in self.points]

    @property
    def lambda_stars(self) -> list[float | None]:
        return [p.lambda_star for p in self.points]


def threshold_point(scenario: Scenario, gamma: float, scan_points: int = SCAN_POINTS) -> ThresholdPoint:
    """Smallest ``lambda*`` such that every valid ``lambda > lambda*`` violates at this ``gamma``.

    The slice is scanned on ``scan_points`` sharpness values first; the last
    non-violating grid point brackets the bisection. More than one sign
    change along the slice marks the point as non-monotone.
    """
    if abs(gamma) > 1 + VALIDITY_TOL:
        raise ValidationError(f"|gamma| must be <= 1, got {gamma}")
    hi = max(0.0, 1.0 - abs(gamma))
    grid = np.linspace(0.0, hi, scan_points)
    pred = np.array([scenario.violated(lam, gamma) for lam in grid])
    monotone = int(np.count_nonzero(pred[1:] != pred[:-1])) <= 1
    if not pred[-1]:
        return ThresholdPoint(float(gamma), None, monotone)
    off = np.nonzero(~pred)[0]
    if off.size == 0:
        return ThresholdPoint(float(gamma), 0.0, monotone)
    k = int(off[-1])
    lo, up = grid[k], grid[k + 1]
    f = lambda lam: scenario.margin(lam, gamma)  # noqa: E731
    if f(lo) == 0.0:
        return ThresholdPoint(float(gamma), float(lo), monotone)
    root = bisect(f, lo, up, xtol=BISECT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)
    return ThresholdPoint(float(gamma), float(root), monotone)


def min_lambda(quantity, gamma: float, scenario: Scenario | None = None) -> float | None:
    scenario = scenario or default_scenario(quantity)
    return threshold_point(scenario, gamma).lambda_star


def threshold_curve(quantity, gammas, scenario: Scenario | None = None) -> ThresholdCurve:
    q = Quantity.parse(quantity)
    scenario = scenario or default_scenario(q)
    return ThresholdCurve(q, [threshold_point(scenario, float(g)) for g in gammas], scenario.to_dict())


def gamma_range(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(round((hi - lo) / step))
    return np.round(lo + np.arange(n + 1) * step, 12) + 0.0


@dataclass(frozen=True)
class GlobalMinimum:
    lambda_star: float
    gammas: tuple[float, ...]


def global_min_lambda(quantity, scenario: Scenario | None = None, gamma_step: float = 0.01,
                      tol: float = 1e-12) -> GlobalMinimum | None:
    """Smallest sharpness admitting a violation at any bias.

    Scans the threshold curve on a gamma grid, then refines every local
    minimum: where the curve ends next to it, bisection on whether the top of
    the slice (``lambda = 1 - |gamma|``) still violates; otherwise a bounded
    scalar minimization between the neighbouring grid points.
    """
    q = Quantity.parse(quantity)
    scenario = scenario or default_scenario(q)
    gammas = gamma_range(-1.0, 1.0, gamma_step)
    stars = [threshold_point(scenario, g).lambda_star for g in gammas]
    if all(s is None for s in stars):
        return None

    def star(g):
        return threshold_point(scenario, g).lambda_star

    def exists(g):
        return scenario.violated(max(0.0, 1.0 - abs(g)), g)

    candidates = []
    for k, s in enumerate(stars):
        if s is None:
            continue
        left = stars[k - 1] if k > 0 else None
        right = stars[k + 1] if k + 1 < len(stars) else None
        if (left is not None and left < s) or (right is not None and right < s):
            continue
        candidates.append((s, float(gammas[k])))
        for nb in (k - 1, k + 1):
            if not 0 <= nb < len(stars):
                continue
            if stars[nb] is None:
                # the curve ends between gammas[k] and gammas[nb]
                inside, outside = float(gammas[k]), float(gammas[nb])
                while abs(outside - inside) > tol:
                    mid = 0.5 * (inside + outside)
                    if exists(mid):
                        inside = mid
                    else:
                        outside = mid
                candidates.append((star(inside), inside))
            else:
                res = minimize_scalar(lambda g: star(g) if star(g) is not None else math.inf,
                                      bounds=sorted((float(gammas[k]), float(gammas[nb]))),
                                      method="bounded", options={"xatol": 1e-10})
                if np.isfinite(res.fun):
                    candidates.append((float(res.fun), float(res.x)))
    best = min(c[0] for c in candidates)
    where = sorted({round(g, 9) for s, g in candidates if s - best <= 1e-9})
    return GlobalMinimum(best, tuple(where))


# serialization --------------------------------------------------------------


def _num(x) -> str:
    return "" if x is None else f"{x:.17g}"


def _bool(x: bool) -> str:
    return "true" if x else "false"


def grid_csv(grid: RegionGrid) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "gamma", "valid", "value", "violated"])
    for lam, g, valid, value, violated in grid.rows():
        w.writerow([_num(lam), _num(g), _bool(valid), _num(value), _bool(violated)])
    return buf.getvalue()


def grid_dict(grid: RegionGrid) -> dict:
    return {
        "quantity": grid.quantity.value,
        "step": grid.step,
        "scenario": grid.scenario,
        "lambda_axis": [float(x) for x in grid.lambda_axis],
        "gamma_axis": [float(x) for x in grid.gamma_axis],
        "cells": [
            {"lambda": lam, "gamma": g, "valid": valid, "value": value, "violated": violated}
            for lam, g, valid, value, violated in grid.rows()
        ],
    }


def curve_csv(curve: ThresholdCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "lambda_star", "monotone"])
    for p in curve.points:
        w.writerow([_num(p.gamma), _num(p.lambda_star), _bool(p.monotone)])
    return buf.getvalue()


def curve_dict(curve: ThresholdCurve) -> dict:
    return {
        "quantity": curve.quantity.value,
        "scenario": curve.scenario,
        "points": [
            {"gamma": p.gamma, "lambda_star": p.lambda_star, "monotone": p.monotone} for p in curve.points
        ],
    }


def render(obj, fmt: str) -> str:
    if fmt not in ("csv", "json"):
        raise ValidationError(f"unknown format {fmt!r}; expected csv or json")
    if isinstance(obj, RegionGrid):
        return grid_csv(obj) if fmt == "csv" else json.dumps(grid_dict(obj), indent=1) + "\n"
    if isinstance(obj, ThresholdCurve):
        return curve_csv(obj) if fmt == "csv" else json.dumps(curve_dict(obj), indent=1) + "\n"
    raise TypeError(f"cannot render {type(obj).__name__}")


def emit(obj, fmt: str, destination) -> Path:
    """Write a grid or curve as CSV or JSON; identical inputs give identical bytes."""
    path = Path(destination)
    path.write_text(render(obj, fmt), encoding="utf-8")
    return path


def default_filename(quantity, step: float, fmt: str = "csv") -> str:
    return f"{Quantity.parse(quantity).value}_{step:g}.{fmt}"
