"""
Covariance-projection criterion and the penalized selection of Î₁.

For a subset K of predictors, with A_K the block selection matrix,

    Π̂_K = A_Kᵀ (A_K Ĉ₁ A_Kᵀ)⁻¹ A_K
    ξ̂_K = ‖Ĉ₁₂ − Ĉ₁ Π̂_K Ĉ₁₂‖_F

vanishes (in population) exactly when K holds every relevant predictor.
Predictors are ranked by φ̂_ℓ = ξ̂_{K_ℓ} + w·f(ℓ)/n^α with K_ℓ = {1..p}∖{ℓ},
and the cardinality D̂ minimises ψ̂_ℓ = ξ̂_{Ĵ_ℓ} + w·g(ν̂_ℓ)/n^β over the nested
sets Ĵ_ℓ = {ν̂_1..ν̂_ℓ}. The weight w is ``penalty_scale``·‖Ĉ₁₂‖_F by default,
which keeps the penalties on the scale of ξ̂ (rescaling the responses
rescales ξ̂ and w alike, leaving Î₁ unchanged).
"""

from __future__ import annotations

import threading
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.linalg import DEFAULT_JITTER, solve_psd

from .base import (
    ArgumentError,
    CovariancePair,
    SelectionConfig,
    SelectionError,
    SelectionResult,
    StackedDesign,
    VariableSubset,
)
from .design import covariances


def _as_subset(K: VariableSubset | Sequence[int]) -> VariableSubset:
    return K if isinstance(K, VariableSubset) else VariableSubset(tuple(K))


def block_columns(K: VariableSubset | Sequence[int], block_dims: Sequence[int]) -> np.ndarray:
    """0-based columns of the stacked design belonging to the blocks in K."""
    subset = _as_subset(K).check(len(block_dims))
    offsets = np.concatenate([[0], np.cumsum(block_dims)]).astype(int)
    return np.concatenate([np.arange(offsets[i - 1], offsets[i]) for i in subset])


def selection_matrix(K: VariableSubset | Sequence[int], block_dims: Sequence[int]) -> np.ndarray:
    """0/1 matrix A_K with A_K x = concatenation of the K-blocks of x."""
    columns = block_columns(K, block_dims)
    matrix = np.zeros((columns.size, int(sum(block_dims))))
    matrix[np.arange(columns.size), columns] = 1.0
    return matrix


def projection_matrix(
    K: VariableSubset | Sequence[int], cov: CovariancePair, *, jitter: float = DEFAULT_JITTER
) -> np.ndarray:
    """Π̂_K = A_Kᵀ (A_K Ĉ₁ A_Kᵀ)⁻¹ A_K, built without forming A_K."""
    subset = _as_subset(K)
    columns = block_columns(subset, cov.block_dims)
    inner = cov.c1[np.ix_(columns, columns)]
    inverse = solve_psd(inner, np.eye(columns.size), jitter=jitter, context=f"K={subset}")
    projection = np.zeros_like(cov.c1)
    projection[np.ix_(columns, columns)] = inverse
    return projection


def xi_hat(
    K: VariableSubset | Sequence[int], cov: CovariancePair, *, jitter: float = DEFAULT_JITTER
) -> float:
    """Frobenius norm of Ĉ₁₂ − Ĉ₁ Π̂_K Ĉ₁₂."""
    subset = _as_subset(K)
    columns = block_columns(subset, cov.block_dims)
    inner = cov.c1[np.ix_(columns, columns)]
    weights = solve_psd(inner, cov.c12[columns], jitter=jitter, context=f"K={subset}")
    residual = cov.c12 - cov.c1[:, columns] @ weights
    return float(np.linalg.norm(residual, "fro"))


class ProjectionCriterion:
    """
    Memoised ξ̂ for one covariance pair.

    ξ̂_K does not depend on (α, β), so a grid search over tuning pairs
    reuses every value computed here.
    """

    def __init__(self, cov: CovariancePair, *, jitter: float = DEFAULT_JITTER) -> None:
        self.cov = cov
        self.jitter = jitter
        self._cache: Dict[Tuple[int, ...], float] = {}
        self._lock = threading.Lock()

    @property
    def p(self) -> int:
        return self.cov.p

    @property
    def n(self) -> int:
        return self.cov.n

    def __call__(self, K: VariableSubset | Sequence[int]) -> float:
        subset = _as_subset(K)
        key = subset.indices
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = xi_hat(subset, self.cov, jitter=self.jitter)
        with self._lock:
            self._cache.setdefault(key, value)
        return value

    def empty(self) -> float:
        """ξ̂ of the empty set: the projection removes nothing."""
        return float(np.linalg.norm(self.cov.c12, "fro"))

    def leave_one_out(self, ell: int) -> float:
        """ξ̂_{K_ℓ} with K_ℓ = {1..p}∖{ℓ}."""
        rest = [k for k in range(1, self.p + 1) if k != ell]
        return self(rest) if rest else self.empty()


def order_by_penalized_statistic(
    xi_values: Sequence[float],
    f: Callable[[float], float],
    alpha: float,
    n: int,
    *,
    scale: float = 1.0,
) -> Tuple[Tuple[int, ...], Tuple[float, ...]]:
    """
    φ̂_ℓ = ξ̂_{K_ℓ} + scale·f(ℓ)/n^α and the descending order of φ̂.

    Ties keep the smaller index first.
    """
    weight = scale / float(n) ** alpha
    phi = tuple(float(xi) + weight * f(ell) for ell, xi in enumerate(xi_values, start=1))
    ordered = tuple(sorted(range(1, len(phi) + 1), key=lambda ell: (-phi[ell - 1], ell)))
    return ordered, phi


def penalty_weight(criterion: ProjectionCriterion, config: SelectionConfig) -> float:
    """Factor in front of f and g: ``penalty_scale``, times ‖Ĉ₁₂‖_F unless absolute."""
    if config.penalty_reference == "absolute":
        return config.penalty_scale
    return config.penalty_scale * criterion.empty()


def _criterion_for(
    cov: CovariancePair, config: SelectionConfig, criterion: Optional[ProjectionCriterion]
) -> ProjectionCriterion:
    if criterion is not None and criterion.cov is cov:
        return criterion
    return ProjectionCriterion(cov, jitter=config.jitter)


def rank_variables(
    cov: CovariancePair,
    config: SelectionConfig,
    n: int,
    *,
    criterion: Optional[ProjectionCriterion] = None,
) -> Tuple[Tuple[int, ...], Tuple[float, ...]]:
    """Order ν̂_1..ν̂_p by decreasing φ̂ (requires p >= 2)."""
    if cov.p < 2:
        raise ArgumentError(f"ranking needs p >= 2 predictors, got {cov.p}")
    crit = _criterion_for(cov, config, criterion)
    xi_values = [crit.leave_one_out(ell) for ell in range(1, cov.p + 1)]
    return order_by_penalized_statistic(
        xi_values, config.f_fn, config.alpha, n, scale=penalty_weight(crit, config)
    )


def estimate_cardinality(
    cov: CovariancePair,
    ordered: Sequence[int],
    config: SelectionConfig,
    n: int,
    *,
    criterion: Optional[ProjectionCriterion] = None,
) -> Tuple[int, Tuple[float, ...]]:
    """
    D̂ = smallest argmin of ψ̂_ℓ = ξ̂_{Ĵ_ℓ} + w·g(ν̂_ℓ)/n^β, w from `penalty_weight`.

    Returns:
        (D̂, (ψ̂_1, ..., ψ̂_p)).
    """
    ordered = tuple(int(v) for v in ordered)
    if sorted(ordered) != list(range(1, cov.p + 1)):
        raise ArgumentError(f"ordering {ordered} is not a permutation of 1..{cov.p}")
    crit = _criterion_for(cov, config, criterion)
    weight = penalty_weight(crit, config) / float(n) ** config.beta
    g = config.g_fn
    psi: List[float] = []
    for ell in range(1, len(ordered) + 1):
        nested = VariableSubset.of(ordered[:ell])
        psi.append(crit(nested) + weight * g(ordered[ell - 1]))
    d_hat = int(np.argmin(psi)) + 1
    return d_hat, tuple(psi)


def select_variables(
    design: StackedDesign,
    config: SelectionConfig,
    *,
    criterion: Optional[ProjectionCriterion] = None,
) -> SelectionResult:
    """
    Î₁ for one sample and one tuning pair.

    Args:
        design: Stacked design of the sample.
        config: Tuning pair and penalties.
        criterion: Memoised criterion for ``design`` (reused across tuning pairs).
    """
    if criterion is None:
        try:
            cov = covariances(design)
        except SelectionError as exc:
            raise exc.at_stage("covariances") from exc
        criterion = ProjectionCriterion(cov, jitter=config.jitter)
    cov = criterion.cov
    n = design.n

    try:
        if design.p == 1:
            ordered, phi = order_by_penalized_statistic(
                [criterion.empty()], config.f_fn, config.alpha, n, scale=penalty_weight(criterion, config)
            )
        else:
            ordered, phi = rank_variables(cov, config, n, criterion=criterion)
    except SelectionError as exc:
        raise exc.at_stage("ranking") from exc

    try:
        d_hat, psi = estimate_cardinality(cov, ordered, config, n, criterion=criterion)
    except SelectionError as exc:
        raise exc.at_stage("cardinality") from exc

    return SelectionResult(ordered=ordered, phi=phi, psi=psi, d_hat=d_hat)


__all__ = [
    "block_columns",
    "selection_matrix",
    "projection_matrix",
    "xi_hat",
    "ProjectionCriterion",
    "order_by_penalized_statistic",
    "penalty_weight",
    "rank_variables",
    "estimate_cardinality",
    "select_variables",
]
