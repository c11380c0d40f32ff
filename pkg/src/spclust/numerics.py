"""Dense symmetric linear algebra used by the graph-learning solvers.

Everything here works on plain float64 numpy arrays. Inputs that are meant
to be symmetric are symmetrized on entry, so downstream code can rely on an
exactly symmetric matrix and a real spectrum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import cho_solve
from scipy.linalg.lapack import dpotrf

ASYMMETRY_WARN_TOL = 1e-8


class FactorizationError(ValueError):
    """Cholesky factorization hit a non-positive pivot.

    ``pivot`` is the 0-based index of the offending leading minor. In the
    solvers this usually means the kernel matrix is badly conditioned or the
    ridge term (2*gamma) is too small.
    """

    def __init__(self, pivot: int):
        self.pivot = pivot
        super().__init__(
            f"matrix is not positive definite: non-positive pivot at index {pivot}; "
            f"the kernel may be badly conditioned or gamma too small"
        )


class EigenSystem(NamedTuple):
    """Full spectrum of a symmetric matrix, eigenvalues ascending.

    ``vectors[:, j]`` is the unit eigenvector paired with ``values[j]``.
    """

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SpdFactorization:
    """Reusable Cholesky factor for solving A @ x = b many times."""

    order: int
    factor: np.ndarray  # lower-triangular LAPACK factor; upper part is garbage


def check_finite(A: np.ndarray, name: str = "matrix") -> None:
    """Raise ValueError naming the first non-finite entry, if any."""
    mask = ~np.isfinite(A)
    if mask.any():
        idx = tuple(int(k) for k in np.argwhere(mask)[0])
        raise ValueError(f"{name} has non-finite entry at index {idx}")


def symmetrize(A: np.ndarray, warn_tol: float = ASYMMETRY_WARN_TOL) -> np.ndarray:
    """Return (A + A.T) / 2, warning when the asymmetry is non-trivial."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    check_finite(A)
    asym = np.abs(A - A.T).max() if A.size else 0.0
    if asym > warn_tol:
        warnings.warn(
            f"symmetrizing matrix with max asymmetry {asym:.3e}", stacklevel=2
        )
    return 0.5 * (A + A.T)


def symmetric_eigen(A: np.ndarray) -> EigenSystem:
    """Full eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    A = symmetrize(A)
    values, vectors = np.linalg.eigh(A)
    return EigenSystem(values, vectors)


def spd_factorize(A: np.ndarray) -> SpdFactorization:
    """Cholesky-factorize a symmetric positive definite matrix.

    Raises FactorizationError (carrying the pivot index) when A is not
    positive definite.
    """
    A = symmetrize(A)
    factor, info = dpotrf(A, lower=1, clean=0, overwrite_a=0)
    if info > 0:
        raise FactorizationError(pivot=int(info) - 1)
    if info < 0:
        raise ValueError(f"illegal value in argument {-info} of dpotrf")
    return SpdFactorization(order=A.shape[0], factor=factor)


def spd_solve(f: SpdFactorization, b: np.ndarray) -> np.ndarray:
    """Solve A @ x = b for one right-hand side vector or a matrix of them."""
    b = np.asarray(b, dtype=float)
    if b.shape[0] != f.order:
        raise ValueError(
            f"right-hand side has leading dimension {b.shape[0]}, expected {f.order}"
        )
    check_finite(b, "right-hand side")
    return cho_solve((f.factor, True), b)
