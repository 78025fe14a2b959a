"""
Prediction error, V-fold cross-validation of (α, β) and the full pipeline.

The pipeline splits the sample into a training and a test part, partitions
the training part into V folds, scores every tuning pair of the grid by

    CV(α, β) = (1/V) Σ_j PL^(j)(α, β),

where PL^(j) is the MSEP on fold j of the subset selected without fold j,
and finally selects on the test part with the minimising pair.
"""

from __future__ import annotations

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.model_selection import KFold, train_test_split

from src.functional import DEFAULT_D_MAX, BasisSpec, FunctionalDataset
from src.utils.linalg import DEFAULT_JITTER, solve_psd

from .base import (
    ArgumentError,
    FoldPlan,
    SelectionConfig,
    SelectionError,
    SelectionResult,
    StackedDesign,
    TuningGrid,
    VariableSubset,
)
from .criterion import ProjectionCriterion, block_columns, select_variables
from .design import DesignBuilder, covariances

logger = logging.getLogger(__name__)

CV_VARIANTS = ("in_fold", "holdout")

Training = Union[FunctionalDataset, StackedDesign]


def sklearn_seed(seed: int, salt: int) -> int:
    """32-bit seed for scikit-learn derived from a 64-bit seed and a purpose salt."""
    return int(np.random.SeedSequence([int(seed) & (2**64 - 1), salt]).generate_state(1)[0])


# ---------------------------------------------------------------------------
# Prediction error
# ---------------------------------------------------------------------------


def _residual_error(
    fit_x: np.ndarray,
    fit_y: np.ndarray,
    eval_x: np.ndarray,
    eval_y: np.ndarray,
    *,
    center: bool,
    jitter: float,
    context: str,
) -> float:
    if center:
        mean_x, mean_y = fit_x.mean(axis=0), fit_y.mean(axis=0)
        fit_x, fit_y = fit_x - mean_x, fit_y - mean_y
        eval_x, eval_y = eval_x - mean_x, eval_y - mean_y
    normal = fit_x.T @ fit_x
    coef = solve_psd(0.5 * (normal + normal.T), fit_x.T @ fit_y, jitter=jitter, context=context)
    residual = eval_y - eval_x @ coef
    return float(np.sum(residual**2)) / eval_y.shape[0]


def msep(
    K: VariableSubset | Sequence[int],
    S: Sequence[int],
    design: StackedDesign,
    *,
    center: bool = False,
    jitter: float = DEFAULT_JITTER,
) -> float:
    """
    In-sample MSEP of the least-squares fit of the K-blocks on rows S.

    (1/m) ‖Y_S − X_S A_Kᵀ (A_K X_Sᵀ X_S A_Kᵀ)⁻¹ A_K X_Sᵀ Y_S‖², with the
    uncentered design unless ``center`` is set.
    """
    subset = K if isinstance(K, VariableSubset) else VariableSubset(tuple(K))
    rows = np.asarray(S, dtype=int)
    if rows.size == 0:
        raise ArgumentError("MSEP needs at least one row")
    if rows.min() < 0 or rows.max() >= design.n:
        raise ArgumentError(f"MSEP rows out of range for n={design.n}")
    columns = block_columns(subset, design.block_dims)
    x = design.vectors[np.ix_(rows, columns)]
    y = design.responses[rows]
    return _residual_error(
        x, y, x, y, center=center, jitter=jitter, context=f"K={subset}, |S|={rows.size}"
    )


def holdout_msep(
    K: VariableSubset | Sequence[int],
    fit_design: StackedDesign,
    eval_vectors: np.ndarray,
    eval_responses: np.ndarray,
    *,
    center: bool = False,
    jitter: float = DEFAULT_JITTER,
) -> float:
    """MSEP on held-out rows of the least-squares fit estimated on ``fit_design``."""
    subset = K if isinstance(K, VariableSubset) else VariableSubset(tuple(K))
    columns = block_columns(subset, fit_design.block_dims)
    eval_y = np.asarray(eval_responses, dtype=float).reshape(len(eval_vectors), -1)
    return _residual_error(
        fit_design.vectors[:, columns],
        fit_design.responses,
        np.asarray(eval_vectors, dtype=float)[:, columns],
        eval_y,
        center=center,
        jitter=jitter,
        context=f"K={subset}, fit n={fit_design.n}",
    )


# ---------------------------------------------------------------------------
# Cross-validation
# ---------------------------------------------------------------------------


def make_folds(n: int, V: int = 5, seed: int = 0) -> FoldPlan:
    """Shuffled V-fold partition of rows 0..n-1 (sizes differ by at most one)."""
    if V < 2:
        raise ArgumentError(f"cross-validation needs V >= 2 folds, got {V}")
    if n < V:
        raise ArgumentError(f"cannot split {n} training rows into {V} folds")
    splitter = KFold(n_splits=V, shuffle=True, random_state=sklearn_seed(seed, 2))
    return FoldPlan(tuple(tuple(int(i) for i in test) for _, test in splitter.split(np.arange(n))))


@dataclass
class _FoldData:
    fit_design: StackedDesign
    eval_vectors: np.ndarray
    eval_responses: np.ndarray
    criterion: ProjectionCriterion
    dimensions: Tuple[int, ...]


@dataclass(frozen=True)
class FoldTerm:
    """Selected set and prediction loss of one fold at one tuning pair."""

    fold: int
    selected: Tuple[int, ...]
    loss: float


class CrossValidator:
    """
    CV(α, β) over a fixed fold plan.

    Each fold's reduced sample gets its own design and memoised criterion,
    built once; only the penalized ordering reruns per tuning pair.

    Args:
        training: Training sample. A `FunctionalDataset` reruns the basis
            dimension choice on every reduced sample; a `StackedDesign`
            keeps its dimensions and only drops rows.
        folds: Fold plan over the training rows.
        template: Penalties and jitter; its (α, β) are replaced per call.
        templates: Basis templates (required for a `FunctionalDataset`).
        d_max: Largest BIC dimension scanned.
        variant: ``in_fold`` fits and scores the least squares on the held
            fold (out of fold once the set has as many columns as the fold
            has rows); ``holdout`` fits on the reduced sample and scores the fold.
        center: Center the least-squares fit.
        cap_to_sample: Cap each reduced sample's dimensions (see `DesignBuilder`).
    """

    def __init__(
        self,
        training: Training,
        folds: FoldPlan,
        template: Optional[SelectionConfig] = None,
        *,
        templates: Optional[Sequence[BasisSpec]] = None,
        d_max: int = DEFAULT_D_MAX,
        variant: str = "in_fold",
        center: bool = False,
        cap_to_sample: bool = False,
    ) -> None:
        if variant not in CV_VARIANTS:
            raise ArgumentError(f"unknown CV variant {variant!r}; choose from {CV_VARIANTS}")
        if folds.n != training.n:
            raise ArgumentError(f"fold plan covers {folds.n} rows but training has {training.n}")
        if isinstance(training, FunctionalDataset) and templates is None:
            raise ArgumentError("basis templates are required to cross-validate a functional sample")

        self.training = training
        self.folds = folds
        self.template = template or SelectionConfig()
        self.templates = list(templates) if templates is not None else None
        self.d_max = d_max
        self.variant = variant
        self.center = center
        self.cap_to_sample = cap_to_sample
        self._losses: Dict[Tuple[int, Tuple[int, ...]], float] = {}
        self._lock = threading.Lock()
        self._folds: List[_FoldData] = []
        for j in range(folds.V):
            try:
                self._folds.append(self._prepare(j))
            except SelectionError as exc:
                raise exc.at_stage(f"fold {j + 1}") from exc

    @property
    def V(self) -> int:  # noqa: N802 - standard notation
        return self.folds.V

    def _prepare(self, j: int) -> _FoldData:
        kept = list(self.folds.complement(j))
        held = list(self.folds.folds[j])
        if isinstance(self.training, StackedDesign):
            fit_design = self.training.subset(kept)
            eval_vectors = self.training.vectors[held]
            eval_responses = self.training.responses[held]
        else:
            builder = DesignBuilder(
                self.templates, self.d_max, warn_degenerate=False, cap_to_sample=self.cap_to_sample
            )
            fit_design = builder.fit_transform(self.training.subset(kept))
            if len(held) < 2:
                raise ArgumentError(f"fold {j + 1} holds a single row")
            eval_design = builder.transform(self.training.subset(held))
            eval_vectors, eval_responses = eval_design.vectors, eval_design.responses
        criterion = ProjectionCriterion(covariances(fit_design), jitter=self.template.jitter)
        return _FoldData(fit_design, eval_vectors, eval_responses, criterion, fit_design.block_dims)

    def fold_dimensions(self, j: int) -> Tuple[int, ...]:
        return self._folds[j].dimensions

    def fold_selection(self, j: int, alpha: float, beta: float) -> SelectionResult:
        data = self._folds[j]
        return select_variables(
            data.fit_design, self.template.with_tuning(alpha, beta), criterion=data.criterion
        )

    def prediction_loss(self, j: int, selected: Sequence[int]) -> float:
        """
        PL^(j) for a selected set (memoised per fold and set).

        The in-fold fit needs more held rows than selected columns; a set at
        or above that size is scored like ``holdout`` instead.
        """
        subset = VariableSubset.of(selected)
        key = (j, subset.indices)
        with self._lock:
            if key in self._losses:
                return self._losses[key]
        data = self._folds[j]
        columns = block_columns(subset, data.dimensions)
        held_rows = data.eval_vectors.shape[0]
        if self.variant == "in_fold" and columns.size < held_rows:
            value = _residual_error(
                data.eval_vectors[:, columns],
                data.eval_responses,
                data.eval_vectors[:, columns],
                data.eval_responses,
                center=self.center,
                jitter=self.template.jitter,
                context=f"K={subset}, |S|={held_rows}",
            )
        else:
            if self.variant == "in_fold":
                logger.debug(
                    "fold %d: K=%s has %d columns for %d held rows, scoring out of fold",
                    j + 1, subset, columns.size, held_rows,
                )
            value = holdout_msep(
                subset,
                data.fit_design,
                data.eval_vectors,
                data.eval_responses,
                center=self.center,
                jitter=self.template.jitter,
            )
        with self._lock:
            self._losses.setdefault(key, value)
        return value

    def fold_terms(self, alpha: float, beta: float) -> List[FoldTerm]:
        terms: List[FoldTerm] = []
        for j in range(self.V):
            try:
                result = self.fold_selection(j, alpha, beta)
                loss = self.prediction_loss(j, result.selected)
            except SelectionError as exc:
                raise exc.at_stage(f"fold {j + 1}") from exc
            terms.append(FoldTerm(fold=j + 1, selected=result.selected_set.indices, loss=loss))
        return terms

    def cv_index(self, alpha: float, beta: float) -> float:
        terms = self.fold_terms(alpha, beta)
        return float(np.mean([term.loss for term in terms]))


def cv_index(
    alpha: float,
    beta: float,
    training: Training,
    folds: FoldPlan,
    template: Optional[SelectionConfig] = None,
    **kwargs: Any,
) -> float:
    """CV(α, β) = mean of the V fold losses."""
    return CrossValidator(training, folds, template, **kwargs).cv_index(alpha, beta)


# ---------------------------------------------------------------------------
# Grid search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridEvaluation:
    """CV value of one tuning pair; ``cv`` is NaN when the pair failed."""

    alpha: float
    beta: float
    cv: float
    fold_sets: Tuple[Tuple[int, ...], ...] = ()
    error: Optional[str] = None


@dataclass
class TuningSurface:
    """All grid evaluations and the minimising pair."""

    evaluations: List[GridEvaluation]
    alpha_hat: float
    beta_hat: float
    cv_min: float

    @property
    def failures(self) -> int:
        return sum(1 for item in self.evaluations if item.error is not None)

    @property
    def best(self) -> Tuple[float, float]:
        return self.alpha_hat, self.beta_hat

    def best_evaluation(self) -> GridEvaluation:
        for item in self.evaluations:
            if item.alpha == self.alpha_hat and item.beta == self.beta_hat:
                return item
        raise SelectionError("minimising pair missing from the surface")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "alpha": [item.alpha for item in self.evaluations],
                "beta": [item.beta for item in self.evaluations],
                "cv": [item.cv for item in self.evaluations],
            }
        )


def search_grid(
    validator: CrossValidator,
    grid: Optional[TuningGrid] = None,
    *,
    max_workers: Optional[int] = None,
) -> TuningSurface:
    """Evaluate CV at every grid point and return the surface with its argmin."""
    grid = grid or TuningGrid()
    points = grid.points()

    def _evaluate(point: Tuple[float, float]) -> GridEvaluation:
        alpha, beta = point
        try:
            terms = validator.fold_terms(alpha, beta)
        except SelectionError as exc:
            logger.warning("tuning pair (%.3f, %.3f) failed: %s", alpha, beta, exc)
            return GridEvaluation(alpha, beta, math.nan, error=str(exc))
        return GridEvaluation(
            alpha,
            beta,
            float(np.mean([term.loss for term in terms])),
            fold_sets=tuple(term.selected for term in terms),
        )

    if max_workers is None or max_workers <= 1:
        evaluations = [_evaluate(point) for point in points]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            evaluations = list(pool.map(_evaluate, points))

    valid = [item for item in evaluations if item.error is None]
    if not valid:
        raise SelectionError(
            f"all {len(points)} grid points failed; first error: {evaluations[0].error}",
            stage="grid",
        )
    best = min(valid, key=lambda item: (item.cv, item.alpha, item.beta))
    return TuningSurface(evaluations, best.alpha, best.beta, best.cv)


def optimize_tuning(
    training: Training,
    folds: FoldPlan,
    grid: Optional[TuningGrid] = None,
    template: Optional[SelectionConfig] = None,
    *,
    max_workers: Optional[int] = None,
    **kwargs: Any,
) -> Tuple[float, float]:
    """(α̂, β̂) minimising CV over the grid; ties go to smaller α, then β."""
    validator = CrossValidator(training, folds, template, **kwargs)
    return search_grid(validator, grid, max_workers=max_workers).best


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


@dataclass
class PipelineConfig:
    """
    Settings of the end-to-end pipeline.

    Attributes:
        d_max: Largest BIC dimension scanned.
        folds: Number of CV folds V.
        test_fraction: Share of the sample held out as test part.
        seed: Seed of the split and fold shuffles.
        cv_variant: ``in_fold`` or ``holdout`` fold loss.
        center_msep: Center the least-squares fits.
        final_on_full_sample: Run the final selection on train ∪ test.
        cap_dimensions: Keep Σ d_ℓ below each fitting sample size (folds,
            test part) by lowering the largest BIC dimensions.
        max_workers: Threads for the grid search.
        selection: Penalties and jitter (its α, β are placeholders).
        grid: Tuning grid.
    """

    d_max: int = DEFAULT_D_MAX
    folds: int = 5
    test_fraction: float = 0.5
    seed: int = 0
    cv_variant: str = "in_fold"
    center_msep: bool = False
    final_on_full_sample: bool = False
    cap_dimensions: bool = True
    max_workers: Optional[int] = None
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    grid: TuningGrid = field(default_factory=TuningGrid)


@dataclass
class PipelineResult:
    """Final selection plus the diagnostics of the tuning stage."""

    selection: SelectionResult
    alpha: float
    beta: float
    surface: TuningSurface
    fold_sets: Tuple[Tuple[int, ...], ...]
    msep_test: float
    train_dimensions: Tuple[int, ...]
    final_dimensions: Tuple[int, ...]
    train_rows: Tuple[int, ...] = ()
    test_rows: Tuple[int, ...] = ()

    @property
    def selected(self) -> Tuple[int, ...]:
        return self.selection.selected_set.indices

    def to_dict(self) -> Dict[str, Any]:
        report = self.selection.to_dict()
        report.update(
            {
                "alpha_hat": self.alpha,
                "beta_hat": self.beta,
                "cv_min": self.surface.cv_min,
                "grid_failures": self.surface.failures,
                "fold_selected": [list(s) for s in self.fold_sets],
                "msep_test": self.msep_test,
                "train_dimensions": list(self.train_dimensions),
                "final_dimensions": list(self.final_dimensions),
                "train_rows": list(self.train_rows),
                "test_rows": list(self.test_rows),
            }
        )
        return report


def _staged(stage: str, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except SelectionError as exc:
        raise exc.at_stage(stage) from exc


def tune_and_select(
    training: FunctionalDataset,
    test: FunctionalDataset,
    templates: Sequence[BasisSpec],
    config: Optional[PipelineConfig] = None,
) -> PipelineResult:
    """Tune (α, β) by V-fold CV on ``training`` and select on ``test``."""
    config = config or PipelineConfig()
    if not training.same_grids(test):
        raise ArgumentError("training and test samples must share their grids")

    folds = _staged("folds", make_folds, training.n, config.folds, config.seed)
    train_builder = DesignBuilder(
        templates, config.d_max, max_workers=config.max_workers, cap_to_sample=config.cap_dimensions
    )
    _staged("training design", train_builder.fit, training)
    validator = _staged(
        "cross-validation",
        CrossValidator,
        training,
        folds,
        config.selection,
        templates=templates,
        d_max=config.d_max,
        variant=config.cv_variant,
        center=config.center_msep,
        cap_to_sample=config.cap_dimensions,
    )
    surface = _staged("grid", search_grid, validator, config.grid, max_workers=config.max_workers)
    alpha, beta = surface.best
    logger.info("selected tuning pair alpha=%.3f beta=%.3f (CV %.6g)", alpha, beta, surface.cv_min)

    test_builder = DesignBuilder(
        templates, config.d_max, max_workers=config.max_workers, cap_to_sample=config.cap_dimensions
    )
    test_design = _staged("test design", test_builder.fit_transform, test)
    if config.final_on_full_sample:
        final_builder = DesignBuilder(
        templates, config.d_max, max_workers=config.max_workers, cap_to_sample=config.cap_dimensions
    )
        final_design = _staged("final design", final_builder.fit_transform, training.concat(test))
    else:
        final_builder, final_design = test_builder, test_design

    selection = _staged(
        "final selection", select_variables, final_design, config.selection.with_tuning(alpha, beta)
    )
    if final_design is test_design:
        msep_test = _staged(
            "test msep",
            msep,
            selection.selected_set,
            range(test_design.n),
            test_design,
            center=config.center_msep,
            jitter=config.selection.jitter,
        )
    else:
        # the test design may have other dimensions; score through the final fit's bases
        test_on_final = _staged("test msep", final_builder.transform, test)
        msep_test = _staged(
            "test msep",
            msep,
            selection.selected_set,
            range(test_on_final.n),
            test_on_final,
            center=config.center_msep,
            jitter=config.selection.jitter,
        )

    return PipelineResult(
        selection=selection,
        alpha=alpha,
        beta=beta,
        surface=surface,
        fold_sets=surface.best_evaluation().fold_sets,
        msep_test=msep_test,
        train_dimensions=tuple(train_builder.dimensions_),
        final_dimensions=tuple(final_builder.dimensions_),
    )


def split_sample(n: int, test_fraction: float = 0.5, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Seeded shuffled split of rows 0..n-1 into sorted training and test rows."""
    if not 0.0 < test_fraction < 1.0:
        raise ArgumentError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    if n < 4:
        raise ArgumentError(f"the pipeline needs n >= 4 observations, got {n}")
    train, test = train_test_split(
        np.arange(n), test_size=test_fraction, random_state=sklearn_seed(seed, 1), shuffle=True
    )
    return np.sort(train), np.sort(test)


def run_pipeline(
    sample: FunctionalDataset,
    templates: Sequence[BasisSpec],
    grid: Optional[TuningGrid] = None,
    V: Optional[int] = None,
    *,
    config: Optional[PipelineConfig] = None,
) -> PipelineResult:
    """
    Split, cross-validate (α, β) on the training part, select on the test part.

    ``grid`` and ``V`` override the corresponding fields of ``config``.
    """
    config = config or PipelineConfig()
    if grid is not None:
        config = replace(config, grid=grid)
    if V is not None:
        config = replace(config, folds=V)
    if len(templates) != sample.p:
        raise ArgumentError(f"{len(templates)} basis templates for {sample.p} predictors")

    train_rows, test_rows = _staged("split", split_sample, sample.n, config.test_fraction, config.seed)
    result = tune_and_select(sample.subset(train_rows), sample.subset(test_rows), templates, config)
    result.train_rows = tuple(int(i) for i in train_rows)
    result.test_rows = tuple(int(i) for i in test_rows)
    return result


__all__ = [
    "CV_VARIANTS",
    "msep",
    "holdout_msep",
    "make_folds",
    "FoldTerm",
    "CrossValidator",
    "cv_index",
    "GridEvaluation",
    "TuningSurface",
    "search_grid",
    "optimize_tuning",
    "PipelineConfig",
    "PipelineResult",
    "tune_and_select",
    "split_sample",
    "run_pipeline",
]
