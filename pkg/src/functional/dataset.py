"""Container for n observations of p curves plus q scalar responses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import ArgumentError

from .basis import Interval, validate_grid
from .expansion import CurveObservation


@dataclass(eq=False)
class FunctionalDataset:
    """
    n observations of p functional predictors and q responses.

    All curves of predictor ℓ share ``grids[ℓ]``.

    Attributes:
        grids: One observation grid per predictor.
        curves: One (n, N_ℓ) value array per predictor.
        responses: (n, q) response matrix; a 1-D vector is read as q = 1.
        intervals: Domain of each predictor; defaults to the grid span.
    """

    grids: Tuple[np.ndarray, ...]
    curves: Tuple[np.ndarray, ...]
    responses: np.ndarray
    intervals: Tuple[Interval, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.grids) == 0:
            raise ArgumentError("dataset needs at least one predictor")
        if len(self.grids) != len(self.curves):
            raise ArgumentError(
                f"{len(self.grids)} grids given for {len(self.curves)} predictors"
            )

        responses = np.asarray(self.responses, dtype=float)
        if responses.ndim == 1:
            responses = responses[:, None]
        if responses.ndim != 2 or responses.shape[1] < 1:
            raise ArgumentError(f"responses must be an (n, q) matrix, got shape {responses.shape}")
        if not np.all(np.isfinite(responses)):
            raise ArgumentError("responses must be finite")
        n = responses.shape[0]

        grids: List[np.ndarray] = []
        curves: List[np.ndarray] = []
        for ell, (grid, values) in enumerate(zip(self.grids, self.curves), start=1):
            try:
                grid = validate_grid(grid)
            except ArgumentError as exc:
                raise exc.at_stage(f"predictor {ell}") from exc
            values = np.asarray(values, dtype=float)
            if values.ndim != 2 or values.shape != (n, grid.size):
                raise ArgumentError(
                    f"predictor {ell}: curves have shape {values.shape}, expected ({n}, {grid.size})"
                )
            if not np.all(np.isfinite(values)):
                raise ArgumentError(f"predictor {ell}: curve values must be finite")
            grids.append(grid)
            curves.append(values)

        intervals = tuple(self.intervals) or tuple(Interval(float(g[0]), float(g[-1])) for g in grids)
        if len(intervals) != len(grids):
            raise ArgumentError(f"{len(intervals)} intervals given for {len(grids)} predictors")

        self.grids = tuple(grids)
        self.curves = tuple(curves)
        self.responses = responses
        self.intervals = intervals

    @property
    def n(self) -> int:
        return self.responses.shape[0]

    @property
    def p(self) -> int:
        return len(self.grids)

    @property
    def q(self) -> int:
        return self.responses.shape[1]

    def curve(self, i: int, ell: int) -> CurveObservation:
        """Curve of observation ``i`` for predictor ``ell`` (both 0-based)."""
        return CurveObservation(self.grids[ell], self.curves[ell][i])

    def observation_table(self) -> List[List[CurveObservation]]:
        """n rows of p `CurveObservation` objects."""
        return [[self.curve(i, ell) for ell in range(self.p)] for i in range(self.n)]

    def subset(self, rows: Sequence[int]) -> "FunctionalDataset":
        index = np.asarray(rows, dtype=int)
        if index.size == 0:
            raise ArgumentError("subset needs at least one row")
        return FunctionalDataset(
            grids=self.grids,
            curves=tuple(values[index] for values in self.curves),
            responses=self.responses[index],
            intervals=self.intervals,
        )

    def concat(self, other: "FunctionalDataset") -> "FunctionalDataset":
        """Rows of ``self`` followed by rows of ``other`` (same grids)."""
        if not self.same_grids(other) or self.q != other.q:
            raise ArgumentError("datasets must share grids and response dimension to be joined")
        return FunctionalDataset(
            grids=self.grids,
            curves=tuple(np.vstack([a, b]) for a, b in zip(self.curves, other.curves)),
            responses=np.vstack([self.responses, other.responses]),
            intervals=self.intervals,
        )

    def same_grids(self, other: "FunctionalDataset") -> bool:
        return self.p == other.p and all(
            np.array_equal(a, b) for a, b in zip(self.grids, other.grids)
        )


__all__ = ["FunctionalDataset"]
