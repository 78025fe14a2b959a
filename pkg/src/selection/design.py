"""
Stacked design vectors and empirical covariance matrices.

`DesignBuilder` chains the basis layer into a `StackedDesign`: it chooses
the BIC dimensions and Gram matrices on one sample (``fit``) and turns a
sample observed on the same grids into design vectors (``transform``).
"""

from __future__ import annotations

import logging
import warnings
from typing import List, Optional, Sequence

import numpy as np

from src.functional import (
    DEFAULT_D_MAX,
    BasisSpec,
    CoordinateVector,
    FunctionalDataset,
    fit_coordinate_matrix,
    gram,
    select_dimensions,
)

from .base import ArgumentError, CovariancePair, SelectionError, StackedDesign

logger = logging.getLogger(__name__)


def stack_blocks(
    blocks: Sequence[np.ndarray],
    grams: Sequence[np.ndarray],
    responses: np.ndarray,
) -> StackedDesign:
    """
    Stack per-predictor coordinate matrices into design vectors.

    Args:
        blocks: p arrays of shape (n, d_ℓ) holding the coordinates X_ℓ^(i).
        grams: p Gram matrices G_ℓ of shape (d_ℓ, d_ℓ).
        responses: (n, q) responses.
    """
    if len(blocks) != len(grams):
        raise ArgumentError(f"{len(blocks)} coordinate blocks for {len(grams)} Gram matrices")
    weighted: List[np.ndarray] = []
    for ell, (coords, g) in enumerate(zip(blocks, grams), start=1):
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        g = np.asarray(g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or coords.shape[1] != g.shape[0]:
            raise ArgumentError(
                f"predictor {ell}: coordinates of length {coords.shape[1]} do not match "
                f"Gram matrix of shape {g.shape}"
            )
        weighted.append(coords @ g.T)
    n_rows = {block.shape[0] for block in weighted}
    if len(n_rows) != 1:
        raise ArgumentError(f"coordinate blocks disagree on the number of observations: {sorted(n_rows)}")
    return StackedDesign(
        vectors=np.hstack(weighted),
        block_dims=tuple(block.shape[1] for block in weighted),
        responses=responses,
    )


def assemble_design(
    coords: Sequence[Sequence[CoordinateVector]],
    grams: Sequence[np.ndarray],
    responses: np.ndarray,
) -> StackedDesign:
    """
    Row i of the result concatenates G_ℓ X_ℓ^(i) over ℓ.

    Args:
        coords: n rows of p coordinate vectors.
        grams: p Gram matrices.
        responses: (n, q) responses.
    """
    rows = [list(row) for row in coords]
    if not rows:
        raise ArgumentError("no coordinate rows given")
    p = len(grams)
    blocks: List[np.ndarray] = []
    for ell in range(p):
        try:
            column = [row[ell].coords for row in rows]
        except IndexError:
            raise ArgumentError(f"coordinate table is missing predictor {ell + 1}") from None
        lengths = {vec.size for vec in column}
        if len(lengths) != 1:
            raise ArgumentError(f"predictor {ell + 1}: coordinate lengths differ across rows {sorted(lengths)}")
        blocks.append(np.vstack(column))
    return stack_blocks(blocks, grams, responses)


def covariances(design: StackedDesign) -> CovariancePair:
    """Two-pass Ĉ₁ and Ĉ₁₂ with divisor n."""
    n = design.n
    if n < 2:
        raise ArgumentError(f"covariances need n >= 2, got {n}")
    mean_x = design.vectors.mean(axis=0)
    mean_y = design.responses.mean(axis=0)
    dev_x = design.vectors - mean_x
    dev_y = design.responses - mean_y
    c1 = dev_x.T @ dev_x / n
    c12 = dev_x.T @ dev_y / n
    return CovariancePair(
        c1=0.5 * (c1 + c1.T),
        c12=c12,
        mean_x=mean_x,
        mean_y=mean_y,
        block_dims=design.block_dims,
        n=n,
    )


def cap_dimensions(dims: Sequence[int], minimums: Sequence[int], limit: int) -> List[int]:
    """
    Lower the largest dimensions one step at a time until Σ d_ℓ <= ``limit``.

    No d_ℓ goes below its family minimum; ties lower the smallest index first.
    """
    capped = [int(d) for d in dims]
    while sum(capped) > limit:
        reducible = [ell for ell, (d, low) in enumerate(zip(capped, minimums)) if d > low]
        if not reducible:
            break
        ell = max(reducible, key=lambda k: (capped[k], -k))
        capped[ell] -= 1
    return capped


class DesignBuilder:
    """
    Fits basis dimensions and Gram matrices on a sample, then builds designs.

    Args:
        templates: One basis template per predictor.
        d_max: Largest BIC dimension scanned.
        dimensions: Fixed dimensions that bypass the BIC scan.
        max_workers: Threads for the BIC scan.
        warn_degenerate: Warn when Σ d_ℓ reaches the sample size.
        cap_to_sample: Lower the BIC dimensions until Σ d_ℓ <= n - 2.
    """

    def __init__(
        self,
        templates: Sequence[BasisSpec],
        d_max: int = DEFAULT_D_MAX,
        *,
        dimensions: Optional[Sequence[int]] = None,
        max_workers: Optional[int] = None,
        warn_degenerate: bool = True,
        cap_to_sample: bool = False,
    ) -> None:
        self.templates = list(templates)
        self.warn_degenerate = warn_degenerate
        self.cap_to_sample = cap_to_sample
        self.d_max = d_max
        self.fixed_dimensions = list(dimensions) if dimensions is not None else None
        self.max_workers = max_workers

        self.specs_: Optional[List[BasisSpec]] = None
        self.grams_: Optional[List[np.ndarray]] = None
        self.grids_: Optional[List[np.ndarray]] = None

    @property
    def dimensions_(self) -> List[int]:
        self._check_fitted()
        return [spec.dimension for spec in self.specs_]

    def _check_fitted(self) -> None:
        if self.specs_ is None:
            raise SelectionError("DesignBuilder must be fitted before use")

    def fit(self, sample: FunctionalDataset) -> "DesignBuilder":
        if len(self.templates) != sample.p:
            raise ArgumentError(f"{len(self.templates)} basis templates for {sample.p} predictors")

        if self.fixed_dimensions is not None:
            if len(self.fixed_dimensions) != sample.p:
                raise ArgumentError(
                    f"{len(self.fixed_dimensions)} fixed dimensions for {sample.p} predictors"
                )
            dims = list(self.fixed_dimensions)
        else:
            try:
                dims = select_dimensions(
                    sample.observation_table(), self.templates, self.d_max, max_workers=self.max_workers
                )
            except SelectionError as exc:
                raise exc.at_stage("dimensions") from exc
            if self.cap_to_sample:
                chosen = dims
                dims = cap_dimensions(dims, [t.min_dimension for t in self.templates], sample.n - 2)
                if dims != chosen:
                    logger.debug("capped dimensions %s to %s for n=%d", chosen, dims, sample.n)

        specs = [template.with_dimension(d) for template, d in zip(self.templates, dims)]
        try:
            grams = [gram(spec, grid) for spec, grid in zip(specs, sample.grids)]
        except SelectionError as exc:
            raise exc.at_stage("gram") from exc

        total = sum(dims)
        logger.debug("fitted basis dimensions %s (total %d) on n=%d", dims, total, sample.n)
        if self.warn_degenerate and total >= sample.n:
            warnings.warn(
                f"Stacked dimension {total} is not below the sample size {sample.n}; "
                "the criterion may not discriminate between subsets",
                UserWarning,
            )

        self.specs_ = specs
        self.grams_ = grams
        self.grids_ = list(sample.grids)
        return self

    def transform(self, sample: FunctionalDataset) -> StackedDesign:
        self._check_fitted()
        if sample.p != len(self.specs_) or not all(
            np.array_equal(grid, fitted) for grid, fitted in zip(sample.grids, self.grids_)
        ):
            raise ArgumentError("sample grids differ from the grids the builder was fitted on")
        try:
            blocks = [
                fit_coordinate_matrix(values, grid, spec)
                for values, grid, spec in zip(sample.curves, sample.grids, self.specs_)
            ]
            return stack_blocks(blocks, self.grams_, sample.responses)
        except SelectionError as exc:
            raise exc.at_stage("design") from exc

    def fit_transform(self, sample: FunctionalDataset) -> StackedDesign:
        return self.fit(sample).transform(sample)


__all__ = ["stack_blocks", "assemble_design", "covariances", "cap_dimensions", "DesignBuilder"]
