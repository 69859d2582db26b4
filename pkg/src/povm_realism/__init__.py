"""Biased unsharp two-outcome measurements versus local and macro realism."""

from .bell import (
    ChshResult,
    ChshSettings,
    chsh_analytic_max,
    chsh_exact_max,
    chsh_expectation,
    chsh_numeric_max,
    verify_corollary,
    violates_chsh,
)
from .errors import ValidationError
from .macroreal import MrScores, PrecessionSpec, klgi, knsit, kwlgi1, kwlgi2, mr_scores, sequential_joint
from .povm import DichotomicPovm, EffectPair, luders_update, make_effects, outcome_probability
from .states import QubitState, TwoQubitState, from_density_matrix, from_hilbert_schmidt, horodecki, random_state
from .sweep import Quantity, RegionGrid, ThresholdCurve, emit, min_lambda, sweep_region

__version__ = "0.1.0"
