"""
Symmetric positive (semi)definite solves with a single jitter rescue.

The criterion and the MSEP both solve small normal systems whose matrices
can be numerically singular when the stacked basis dimension approaches the
sample size. `solve_psd` factors with Cholesky; when a pivot is non-positive
(or vanishes relative to the diagonal) it adds `jitter * trace / dim` to the
diagonal, retries once and otherwise raises `NumericalError`.
"""

from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import NumericalError

logger = logging.getLogger(__name__)

DEFAULT_JITTER = 1e-10
PIVOT_TOLERANCE = 1e-12

Factor = Tuple[np.ndarray, bool]


def _factor(matrix: np.ndarray, *, tolerance: float) -> Optional[Factor]:
    try:
        chol, lower = cho_factor(matrix, lower=True, check_finite=False)
    except LinAlgError:
        return None
    pivots = np.diag(chol) ** 2
    scale = float(np.max(np.diag(matrix)))
    if not np.all(np.isfinite(pivots)) or np.min(pivots) <= tolerance * scale:
        return None
    return chol, lower


def solve_psd(
    matrix: np.ndarray,
    rhs: np.ndarray,
    *,
    jitter: float = DEFAULT_JITTER,
    context: str = "",
) -> np.ndarray:
    """
    Solve ``matrix @ x = rhs`` for a symmetric PSD ``matrix``.

    Args:
        matrix: Square symmetric matrix.
        rhs: Right-hand side vector or matrix.
        jitter: Relative ridge added once if the first factorization fails.
        context: Label included in the error message (subset, sample size).

    Raises:
        NumericalError: if the matrix is not finite, has a non-positive trace,
            or is still singular after the jitter retry.
    """
    matrix = np.asarray(matrix, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    where = f" ({context})" if context else ""

    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NumericalError(f"expected a square matrix, got shape {matrix.shape}{where}")
    if not np.all(np.isfinite(matrix)):
        raise NumericalError(f"matrix has non-finite entries{where}")

    factor = _factor(matrix, tolerance=PIVOT_TOLERANCE)
    if factor is None:
        dim = matrix.shape[0]
        trace = float(np.trace(matrix))
        if trace <= 0.0:
            raise NumericalError(f"matrix has non-positive trace {trace:.3e}{where}")
        ridge = jitter * trace / dim
        logger.debug("Cholesky rescue: adding jitter %.3e to %dx%d matrix%s", ridge, dim, dim, where)
        factor = _factor(matrix + ridge * np.eye(dim), tolerance=0.0)
        if factor is None:
            raise NumericalError(f"matrix is singular after jitter {ridge:.3e}{where}")

    return cho_solve(factor, rhs, check_finite=False)


def is_psd(matrix: np.ndarray, *, tolerance: float = 1e-10) -> bool:
    """True when the smallest eigenvalue is at least ``-tolerance * trace``."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return True
    trace = float(np.trace(matrix))
    smallest = float(np.linalg.eigvalsh(matrix).min())
    return smallest >= -tolerance * abs(trace)


__all__ = ["DEFAULT_JITTER", "PIVOT_TOLERANCE", "solve_psd", "is_psd"]
