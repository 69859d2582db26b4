"""Small dense linear algebra on qubit (2x2) and qubit-pair (4x4) operators.

Operators are plain ``numpy`` complex arrays; real 3-vectors and 3x3 matrices
are plain float arrays. Pauli index convention: 0 -> x, 1 -> y, 2 -> z.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NotHermitianError, NotPsdError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
SYMMETRIC_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)

for _m in (I2, I4, SX, SY, SZ):
    _m.setflags(write=False)


def _square(m: np.ndarray, dims=(2, 4)) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in dims:
        raise DimensionError(f"expected a square matrix of dimension {dims}, got shape {m.shape}")
    return m


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = _square(a), _square(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two qubit operators; block (i, j) is ``a[i, j] * b``."""
    a, b = _square(a, (2,)), _square(b, (2,))
    return np.kron(a, b)


def dot_sigma(v) -> np.ndarray:
    """``v . sigma`` for a real 3-vector."""
    x, y, z = v
    return x * SX + y * SY + z * SZ


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def _require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = _square(m)
    if not is_hermitian(m, tol):
        raise NotHermitianError(f"matrix is not Hermitian within {tol:g}")
    return m


def hermitian_eigen(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a 2x2 or 4x4 Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` in descending order and the
    matching orthonormal eigenvectors as the columns of ``v``.
    """
    m = _require_hermitian(m)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return w[::-1], v[:, ::-1]


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as zero; anything more
    negative raises :class:`NotPsdError`.
    """
    w, v = hermitian_eigen(m)
    if w[-1] < -PSD_TOL:
        raise NotPsdError(f"matrix has eigenvalue {w[-1]:.3e} < -{PSD_TOL:g}")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return (root + root.conj().T) / 2


def sym_eigen3(v: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real symmetric 3x3 matrix, largest first."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3, 3):
        raise DimensionError(f"expected 3x3 matrix, got {v.shape}")
    if np.max(np.abs(v - v.T)) > SYMMETRIC_TOL * max(1.0, np.max(np.abs(v))):
        raise NotHermitianError("matrix is not symmetric")
    return np.linalg.eigvalsh((v + v.T) / 2)[::-1]


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise DimensionError(f"expected a 3-vector, got shape {v.shape}")
    n = np.linalg.norm(v)
    if n == 0.0:
        raise DimensionError("zero vector has no direction")
    return v / n


def is_unit(v, tol: float = 1e-10) -> bool:
    return abs(float(np.linalg.norm(v)) - 1.0) <= tol
