"""
Basis families for functional predictors.

Three families are supported:

* ``fourier``  - cosine system on the rescaled interval, orthonormal in L².
* ``bspline``  - order-``bspline_order`` B-splines on equispaced interior knots.
* ``gaussian`` - Gaussian radial functions exp(-(t - c_k)² / (2 γ σ_k²)).

`eval_basis` returns the N×d design of basis values on a grid and `gram`
returns the d×d matrix of pairwise inner products used to build the stacked
design vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import BSpline

from src.utils.errors import ArgumentError, DomainError, NumericalError
from src.utils.linalg import is_psd


class BasisFamily(str, Enum):
    FOURIER = "fourier"
    BSPLINE = "bspline"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class Interval:
    """
    Closed domain [lo, hi] of a functional predictor.

    Attributes:
        lo: Domain start.
        hi: Domain end, strictly greater than ``lo``.
    """

    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo >= self.hi:
            raise ArgumentError(f"interval requires finite lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class BasisSpec:
    """
    A basis family on an interval with its dimension and family parameters.

    Attributes:
        family: One of ``fourier``, ``bspline`` or ``gaussian``.
        dimension: Number of basis functions d.
        interval: Domain of the predictor.
        bspline_order: Spline order (4 = cubic); B-splines only.
        centers: Optional Gaussian centres c_k (length d).
        widths: Optional Gaussian widths σ_k > 0 (length d).
        scale: Gaussian scale γ > 0.
    """

    family: BasisFamily
    dimension: int
    interval: Interval = Interval()
    bspline_order: int = 4
    centers: Optional[Tuple[float, ...]] = None
    widths: Optional[Tuple[float, ...]] = None
    scale: float = 1.0

    def __post_init__(self) -> None:
        try:
            family = (
                self.family
                if isinstance(self.family, BasisFamily)
                else BasisFamily(str(self.family).strip().lower())
            )
        except ValueError as exc:
            raise ArgumentError(f"unknown basis family {self.family!r}") from exc
        object.__setattr__(self, "family", family)

        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ArgumentError(f"basis dimension must be a positive integer, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))

        if family is BasisFamily.BSPLINE:
            if self.bspline_order < 1:
                raise ArgumentError(f"bspline_order must be >= 1, got {self.bspline_order}")
            if self.dimension < self.bspline_order:
                raise ArgumentError(
                    f"B-spline dimension {self.dimension} is below its order {self.bspline_order}"
                )

        if family is BasisFamily.GAUSSIAN:
            if self.scale <= 0:
                raise ArgumentError(f"Gaussian scale must be positive, got {self.scale}")
            for name in ("centers", "widths"):
                values = getattr(self, name)
                if values is None:
                    continue
                values = tuple(float(v) for v in values)
                if len(values) != self.dimension:
                    raise ArgumentError(
                        f"Gaussian {name} has length {len(values)}, expected {self.dimension}"
                    )
                object.__setattr__(self, name, values)
            if self.widths is not None and min(self.widths) <= 0:
                raise ArgumentError("Gaussian widths must be positive")

    @property
    def min_dimension(self) -> int:
        """Smallest admissible dimension for this family."""
        return self.bspline_order if self.family is BasisFamily.BSPLINE else 1

    def with_dimension(self, dimension: int) -> "BasisSpec":
        """Same family and interval at another dimension."""
        if dimension == self.dimension:
            return self
        # explicit Gaussian parameters only make sense at their own dimension
        return replace(self, dimension=dimension, centers=None, widths=None)

    def gaussian_parameters(self) -> Tuple[np.ndarray, np.ndarray]:
        """Centres and widths, defaulting to equispaced centres with σ = spacing."""
        lo, hi = self.interval.lo, self.interval.hi
        d = self.dimension
        if self.centers is not None:
            centers = np.asarray(self.centers, dtype=float)
        else:
            centers = np.linspace(lo, hi, d)
        if self.widths is not None:
            widths = np.asarray(self.widths, dtype=float)
        else:
            spacing = (hi - lo) / (d - 1) if d > 1 else hi - lo
            widths = np.full(d, spacing)
        return centers, widths

    def knots(self) -> np.ndarray:
        """Full knot vector with repeated boundary knots (B-splines only)."""
        order = self.bspline_order
        lo, hi = self.interval.lo, self.interval.hi
        interior = np.linspace(lo, hi, self.dimension - order + 2)[1:-1]
        return np.concatenate([np.full(order, lo), interior, np.full(order, hi)])


def default_grid(interval: Interval, n_points: int) -> np.ndarray:
    """``n_points`` equispaced points covering ``interval``."""
    if n_points < 2:
        raise ArgumentError(f"a grid needs at least 2 points, got {n_points}")
    return np.linspace(interval.lo, interval.hi, n_points)


def validate_grid(grid: Sequence[float], interval: Optional[Interval] = None) -> np.ndarray:
    """Return ``grid`` as a float array after checking length, order and domain."""
    points = np.asarray(grid, dtype=float)
    if points.ndim != 1 or points.size == 0:
        raise ArgumentError("grid must be a non-empty 1-D sequence")
    if points.size < 2:
        raise ArgumentError(f"grid needs at least 2 points, got {points.size}")
    if not np.all(np.isfinite(points)):
        raise ArgumentError("grid contains non-finite values")
    if np.any(np.diff(points) <= 0):
        raise ArgumentError("grid must be strictly increasing")
    if interval is not None:
        slack = 1e-12 * interval.length
        if points[0] < interval.lo - slack or points[-1] > interval.hi + slack:
            raise DomainError(
                f"grid [{points[0]}, {points[-1]}] leaves interval [{interval.lo}, {interval.hi}]"
            )
        points = np.clip(points, interval.lo, interval.hi)
    return points


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _fourier_values(spec: BasisSpec, grid: np.ndarray) -> np.ndarray:
    length = spec.interval.length
    u = (grid - spec.interval.lo) / length
    frequencies = np.arange(spec.dimension)
    values = math.sqrt(2.0) * np.cos(np.pi * np.outer(u, frequencies))
    values[:, 0] = 1.0
    if length != 1.0:
        values /= math.sqrt(length)
    return values


def _bspline_values(spec: BasisSpec, grid: np.ndarray) -> np.ndarray:
    spline = BSpline(spec.knots(), np.eye(spec.dimension), spec.bspline_order - 1, extrapolate=False)
    values = spline(grid)
    return np.nan_to_num(values, nan=0.0)


def _gaussian_values(spec: BasisSpec, grid: np.ndarray) -> np.ndarray:
    centers, widths = spec.gaussian_parameters()
    offsets = grid[:, None] - centers[None, :]
    return np.exp(-(offsets**2) / (2.0 * spec.scale * widths[None, :] ** 2))


def eval_basis(spec: BasisSpec, grid: Sequence[float]) -> np.ndarray:
    """
    Evaluate every basis function of ``spec`` on ``grid``.

    Returns:
        Array of shape (N, d); column k holds φ_k(t_r).

    Raises:
        ArgumentError: empty, too short or non-increasing grid.
        DomainError: grid points outside ``spec.interval``.
    """
    points = validate_grid(grid, spec.interval)
    if spec.family is BasisFamily.FOURIER:
        return _fourier_values(spec, points)
    if spec.family is BasisFamily.BSPLINE:
        return _bspline_values(spec, points)
    return _gaussian_values(spec, points)


# ---------------------------------------------------------------------------
# Gram matrices
# ---------------------------------------------------------------------------


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    """Weights w such that Σ w_r f(t_r) is the trapezoid rule on ``grid``."""
    widths = np.diff(grid)
    weights = np.zeros(grid.size)
    weights[:-1] += widths / 2.0
    weights[1:] += widths / 2.0
    return weights


def _gaussian_gram(spec: BasisSpec) -> np.ndarray:
    centers, widths = spec.gaussian_parameters()
    var_sum = widths[:, None] ** 2 + widths[None, :] ** 2
    prefactor = math.sqrt(2.0 * math.pi) * np.outer(widths, widths) / np.sqrt(var_sum)
    gaps = centers[:, None] - centers[None, :]
    return prefactor * np.exp(-(gaps**2) / (2.0 * spec.scale * var_sum))


def gram(spec: BasisSpec, grid: Optional[Sequence[float]] = None) -> np.ndarray:
    """
    Gram matrix G with g_km = <φ_k, φ_m>.

    Fourier returns the exact identity and Gaussian the closed form; both
    ignore ``grid``. B-splines use the trapezoid rule on ``grid``, which is
    therefore required for that family.

    Raises:
        NumericalError: if the result is not PSD within 1e-10·trace.
    """
    if spec.family is BasisFamily.FOURIER:
        return np.eye(spec.dimension)

    if spec.family is BasisFamily.GAUSSIAN:
        matrix = _gaussian_gram(spec)
    else:
        if grid is None:
            raise ArgumentError("B-spline Gram matrix needs the observation grid")
        points = validate_grid(grid, spec.interval)
        values = eval_basis(spec, points)
        matrix = values.T @ (trapezoid_weights(points)[:, None] * values)

    matrix = 0.5 * (matrix + matrix.T)
    if not is_psd(matrix):
        raise NumericalError(
            f"{spec.family.value} Gram matrix of dimension {spec.dimension} is not positive semidefinite"
        )
    return matrix


__all__ = [
    "BasisFamily",
    "Interval",
    "BasisSpec",
    "default_grid",
    "validate_grid",
    "eval_basis",
    "trapezoid_weights",
    "gram",
]
