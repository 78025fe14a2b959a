"""
Basis coordinates of observed curves and BIC choice of basis dimensions.

Coordinates are ordinary least-squares fits of the grid values on the
evaluated basis. For each curve the dimension m minimising

    BIC(m) = ln(RSS_m) + (m + 1) ln(N) / N

is retained and a predictor's dimension is the largest per-curve choice.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.utils.errors import ArgumentError, NumericalError, SelectionError

from .basis import BasisSpec, eval_basis, validate_grid

EXACT_FIT = -math.inf
EXACT_FIT_TOLERANCE = 1e-12
DEFAULT_D_MAX = 15


@dataclass(frozen=True, eq=False)
class CurveObservation:
    """
    One curve observed on a grid.

    Attributes:
        grid: Strictly increasing observation times (N ≥ 2).
        values: Curve values at ``grid``.
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = validate_grid(self.grid)
        values = np.asarray(self.values, dtype=float)
        if values.shape != grid.shape:
            raise ArgumentError(
                f"curve has {values.size} values for {grid.size} grid points"
            )
        if not np.all(np.isfinite(values)):
            raise ArgumentError("curve values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class CoordinateVector:
    """Basis coordinates of one curve."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=float).reshape(-1)
        if not np.all(np.isfinite(coords)):
            raise NumericalError("basis coordinates are not finite")
        object.__setattr__(self, "coords", coords)

    def __len__(self) -> int:
        return self.coords.size


def _least_squares(design: np.ndarray, values: np.ndarray, dimension: int):
    if design.shape[0] < dimension:
        raise NumericalError(
            f"dimension {dimension} exceeds the {design.shape[0]} grid points available"
        )
    coef, _, rank, _ = np.linalg.lstsq(design, values, rcond=None)
    if rank < dimension:
        raise NumericalError(
            f"basis design of dimension {dimension} has rank {rank} on {design.shape[0]} grid points"
        )
    residual = values - design @ coef
    return coef, residual


def fit_coordinates(curve: CurveObservation, spec: BasisSpec) -> CoordinateVector:
    """Least-squares coordinates of ``curve`` on ``spec``."""
    design = eval_basis(spec, curve.grid)
    coef, _ = _least_squares(design, curve.values, spec.dimension)
    return CoordinateVector(coef)


def fit_coordinate_matrix(values: np.ndarray, grid: np.ndarray, spec: BasisSpec) -> np.ndarray:
    """Coordinates of n curves sharing ``grid``; returns an (n, d) array."""
    design = eval_basis(spec, grid)
    coef, _ = _least_squares(design, np.asarray(values, dtype=float).T, spec.dimension)
    return coef.T


def reconstruct(coords: CoordinateVector, spec: BasisSpec, grid: Sequence[float]) -> np.ndarray:
    """Values of Σ_k coords_k φ_k on ``grid``."""
    return eval_basis(spec, grid) @ coords.coords


def _bic(rss: np.ndarray, values_norm_sq: np.ndarray, dimension: int, n_points: int) -> np.ndarray:
    rss = np.asarray(rss, dtype=float)
    exact = (rss == 0.0) | (rss <= EXACT_FIT_TOLERANCE**2 * values_norm_sq)
    penalty = (dimension + 1) * math.log(n_points) / n_points
    with np.errstate(divide="ignore"):
        scores = np.log(rss) + penalty
    return np.where(exact, EXACT_FIT, scores)


def bic_score(curve: CurveObservation, spec: BasisSpec) -> float:
    """
    ln(RSS) + (m + 1) ln(N) / N for the fit of ``curve`` at ``spec.dimension``.

    An exact fit (RSS zero up to round-off) returns the ``EXACT_FIT`` sentinel
    (-inf) so that the smallest exact dimension wins the scan.
    """
    _, residual = _least_squares(eval_basis(spec, curve.grid), curve.values, spec.dimension)
    rss = float(residual @ residual)
    norm_sq = float(curve.values @ curve.values)
    return float(_bic(np.array([rss]), np.array([norm_sq]), spec.dimension, curve.grid.size)[0])


def is_exact_fit(score: float) -> bool:
    return score == EXACT_FIT


def candidate_dimensions(spec: BasisSpec, d_max: int) -> List[int]:
    """Dimensions scanned for ``spec``: family minimum up to ``d_max``."""
    if d_max < 1:
        raise ArgumentError(f"d_max must be >= 1, got {d_max}")
    lowest = spec.min_dimension
    return list(range(lowest, max(d_max, lowest) + 1))


def _scan_shared_grid(curves: Sequence[CurveObservation], spec: BasisSpec, d_max: int) -> np.ndarray:
    """Per-curve BIC argmin for curves that share one grid."""
    grid = curves[0].grid
    values = np.column_stack([curve.values for curve in curves])
    norm_sq = np.sum(values**2, axis=0)
    dims = candidate_dimensions(spec, d_max)
    scores = np.empty((len(dims), len(curves)))
    for row, m in enumerate(dims):
        _, residual = _least_squares(eval_basis(spec.with_dimension(m), grid), values, m)
        scores[row] = _bic(np.sum(residual**2, axis=0), norm_sq, m, grid.size)
    # argmin returns the first minimum, i.e. the smallest m on ties
    return np.asarray(dims)[np.argmin(scores, axis=0)]


def _scan_curve(curve: CurveObservation, spec: BasisSpec, d_max: int) -> int:
    dims = candidate_dimensions(spec, d_max)
    scores = [bic_score(curve, spec.with_dimension(m)) for m in dims]
    return dims[int(np.argmin(scores))]


def _predictor_dimension(
    column: Sequence[CurveObservation], spec: BasisSpec, d_max: int, ell: int
) -> int:
    shared = all(np.array_equal(curve.grid, column[0].grid) for curve in column)
    if shared:
        try:
            return int(np.max(_scan_shared_grid(column, spec, d_max)))
        except SelectionError as exc:
            raise exc.at_stage(f"predictor {ell}, {len(column)} curves on a shared grid") from exc

    best = 0
    for i, curve in enumerate(column, start=1):
        try:
            best = max(best, _scan_curve(curve, spec, d_max))
        except SelectionError as exc:
            raise exc.at_stage(f"curve i={i}, predictor {ell}") from exc
    return best


def select_dimensions(
    sample: Sequence[Sequence[CurveObservation]],
    specs: Sequence[BasisSpec],
    d_max: int = DEFAULT_D_MAX,
    *,
    max_workers: Optional[int] = None,
) -> List[int]:
    """
    BIC dimension of every predictor.

    Args:
        sample: n rows of p curves (row i holds X_1^(i), ..., X_p^(i)).
        specs: One basis template per predictor (its dimension is ignored).
        d_max: Largest dimension scanned (raised to the family minimum).
        max_workers: Threads used across predictors; ``None`` or 1 runs serially.

    Returns:
        d_1..d_p, each the maximum over curves of the per-curve BIC argmin.
    """
    rows = [list(row) for row in sample]
    if not rows:
        raise ArgumentError("sample has no observations")
    p = len(specs)
    for i, row in enumerate(rows, start=1):
        if len(row) != p:
            raise ArgumentError(f"observation {i} has {len(row)} curves, expected {p}")
    columns = [[row[ell] for row in rows] for ell in range(p)]

    def _work(ell: int) -> int:
        return _predictor_dimension(columns[ell], specs[ell], d_max, ell + 1)

    if max_workers is None or max_workers <= 1 or p == 1:
        return [_work(ell) for ell in range(p)]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_work, range(p)))


__all__ = [
    "EXACT_FIT",
    "DEFAULT_D_MAX",
    "CurveObservation",
    "CoordinateVector",
    "fit_coordinates",
    "fit_coordinate_matrix",
    "reconstruct",
    "bic_score",
    "is_exact_fit",
    "candidate_dimensions",
    "select_dimensions",
]
