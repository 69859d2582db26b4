"""Qubit and two-qubit states in Bloch / Hilbert-Schmidt form.

A two-qubit density matrix is written as

    rho = 1/4 (I(x)I + sum_i r_i sig_i(x)I + sum_i s_i I(x)sig_i + sum_ij t_ij sig_i(x)sig_j)

with Alice's local vector ``r``, Bob's local vector ``s`` and the real
correlation matrix ``T`` (Alice index first). :func:`horodecki` gives the sum
of the two largest eigenvalues of ``T T^t``, the quantity that decides CHSH
violation under projective measurements.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import DimensionError, NotAStateError
from .qmat import I2, PAULIS, PSD_TOL, hermitian_eigen, is_hermitian, sym_eigen3, tensor

TRACE_TOL = 1e-10

# Hilbert-Schmidt basis, precomputed once: _BASIS[a][b] = sigma_a x sigma_b with sigma_0 = I
_SIGMA0 = (I2,) + PAULIS
_BASIS = [[tensor(a, b) for b in _SIGMA0] for a in _SIGMA0]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QubitState:
    """Single-qubit state with Bloch vector ``r (sin t cos p, sin t sin p, cos t)``."""

    r: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.r <= 1 + 1e-12:
            raise NotAStateError(f"Bloch radius must lie in [0, 1], got {self.r}")

    @property
    def bloch(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        ) * self.r

    @property
    def rho(self) -> np.ndarray:
        x, y, z = self.bloch
        return 0.5 * (I2 + x * PAULIS[0] + y * PAULIS[1] + z * PAULIS[2])


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    rvec: np.ndarray
    svec: np.ndarray
    tmat: np.ndarray
    rho: np.ndarray

    def to_dict(self) -> dict:
        return {
            "rvec": [float(x) for x in self.rvec],
            "svec": [float(x) for x in self.svec],
            "tmat": [[float(x) for x in row] for row in self.tmat],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TwoQubitState":
        return from_hilbert_schmidt(d["rvec"], d["svec"], d["tmat"])


@dataclass(frozen=True)
class HorodeckiSummary:
    m_value: float
    s_norm: float
    eigs: tuple[float, float, float]


def _validate_rho(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionError(f"two-qubit density matrix must be 4x4, got {rho.shape}")
    if not is_hermitian(rho, 1e-10):
        raise NotAStateError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotAStateError(f"density matrix has trace {tr!r}, expected 1")
    w, _ = hermitian_eigen(rho)
    if w[-1] < -PSD_TOL:
        raise NotAStateError(f"density matrix has negative eigenvalue {w[-1]:.3e}")
    return rho


def from_hilbert_schmidt(rvec, svec, tmat) -> TwoQubitState:
    """Build and validate the state with local vectors ``rvec``, ``svec`` and correlations ``tmat``."""
    rvec, svec, tmat = _frozen(rvec), _frozen(svec), _frozen(tmat)
    if rvec.shape != (3,) or svec.shape != (3,) or tmat.shape != (3, 3):
        raise DimensionError("expected rvec, svec of shape (3,) and tmat of shape (3, 3)")
    rho = _BASIS[0][0].copy()
    for i in range(3):
        rho = rho + rvec[i] * _BASIS[i + 1][0] + svec[i] * _BASIS[0][i + 1]
        for j in range(3):
            rho = rho + tmat[i, j] * _BASIS[i + 1][j + 1]
    rho = rho / 4
    _validate_rho(rho)
    rho.setflags(write=False)
    return TwoQubitState(rvec, svec, tmat, rho)


def from_density_matrix(rho) -> TwoQubitState:
    rho = _validate_rho(rho)
    coeff = np.array([[np.trace(rho @ _BASIS[a][b]).real for b in range(4)] for a in range(4)])
    rho = rho.copy()
    rho.setflags(write=False)
    return TwoQubitState(_frozen(coeff[1:, 0]), _frozen(coeff[0, 1:]), _frozen(coeff[1:, 1:]), rho)


def horodecki(state: TwoQubitState) -> HorodeckiSummary:
    t = state.tmat
    eigs = sym_eigen3(t @ t.T)
    # T T^t is PSD; tiny negative rounding would poison the square root downstream
    eigs = np.clip(eigs, 0.0, None)
    return HorodeckiSummary(
        m_value=float(eigs[0] + eigs[1]),
        s_norm=float(np.linalg.norm(state.svec)),
        eigs=(float(eigs[0]), float(eigs[1]), float(eigs[2])),
    )


def random_density_matrix(rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state(seed) -> TwoQubitState:
    """Seeded draw of ``G G^dagger / Tr(G G^dagger)`` with Gaussian ``G``.

    ``seed`` may also be a ``numpy.random.Generator``, in which case it is
    advanced in place.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return from_density_matrix(random_density_matrix(rng))


def random_states(count: int, seed) -> list[TwoQubitState]:
    rng = np.random.default_rng(seed)
    return [random_state(rng) for _ in range(count)]


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def apply_local_unitaries(state: TwoQubitState, ua: np.ndarray, ub: np.ndarray) -> TwoQubitState:
    u = tensor(ua, ub)
    return from_density_matrix(u @ state.rho @ u.conj().T)


def singlet() -> TwoQubitState:
    return from_hilbert_schmidt(np.zeros(3), np.zeros(3), -np.eye(3))


def maximally_mixed() -> TwoQubitState:
    return from_hilbert_schmidt(np.zeros(3), np.zeros(3), np.zeros((3, 3)))


def product_zero() -> TwoQubitState:
    """|00><00|."""
    return from_hilbert_schmidt([0, 0, 1], [0, 0, 1], np.diag([0.0, 0.0, 1.0]))


def werner(p: float) -> TwoQubitState:
    """``p |singlet><singlet| + (1 - p) I/4``."""
    return from_hilbert_schmidt(np.zeros(3), np.zeros(3), -p * np.eye(3))


def purity(state: TwoQubitState) -> float:
    return float(np.trace(state.rho @ state.rho).real)
