"""
Shared types for variable selection.

The selection layer works on a `StackedDesign` (one row per observation,
the concatenated Gram-weighted basis coordinates of its p curves) and
produces a `SelectionResult`. Variable indices are 1-based everywhere, as
in reports; array rows and columns stay 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from src.utils.errors import (
    ArgumentError,
    DataFormatError,
    DomainError,
    NumericalError,
    SelectionError,
)
from src.utils.linalg import DEFAULT_JITTER

from .penalties import Penalty, resolve_decreasing, resolve_increasing


PENALTY_REFERENCES = ("cross_covariance", "absolute")


def _block_offsets(block_dims: Sequence[int]) -> np.ndarray:
    return np.concatenate([[0], np.cumsum(block_dims)]).astype(int)


@dataclass(eq=False)
class StackedDesign:
    """
    Stacked design vectors and responses.

    Attributes:
        vectors: (n, d) matrix; row i is 𝒳^(i) = (G_1 X_1^(i) | ... | G_p X_p^(i)).
        block_dims: d_1..d_p with Σ d_ℓ = d.
        responses: (n, q) response matrix.
    """

    vectors: np.ndarray
    block_dims: Tuple[int, ...]
    responses: np.ndarray

    def __post_init__(self) -> None:
        vectors = np.asarray(self.vectors, dtype=float)
        responses = np.asarray(self.responses, dtype=float)
        if responses.ndim == 1:
            responses = responses[:, None]
        dims = tuple(int(d) for d in self.block_dims)
        if vectors.ndim != 2:
            raise ArgumentError(f"design vectors must be a matrix, got shape {vectors.shape}")
        if not dims or min(dims) < 1:
            raise ArgumentError(f"block dimensions must be positive, got {dims}")
        if sum(dims) != vectors.shape[1]:
            raise ArgumentError(
                f"block dimensions sum to {sum(dims)} but vectors have length {vectors.shape[1]}"
            )
        if vectors.shape[0] < 2:
            raise ArgumentError(f"a design needs n >= 2 observations, got {vectors.shape[0]}")
        if responses.ndim != 2 or responses.shape[0] != vectors.shape[0] or responses.shape[1] < 1:
            raise ArgumentError(
                f"responses of shape {responses.shape} do not match {vectors.shape[0]} observations"
            )
        self.vectors = vectors
        self.responses = responses
        self.block_dims = dims

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    @property
    def p(self) -> int:
        return len(self.block_dims)

    @property
    def q(self) -> int:
        return self.responses.shape[1]

    def block(self, ell: int) -> np.ndarray:
        """Columns of predictor ``ell`` (1-based)."""
        offsets = _block_offsets(self.block_dims)
        return self.vectors[:, offsets[ell - 1] : offsets[ell]]

    def subset(self, rows: Sequence[int]) -> "StackedDesign":
        index = np.asarray(rows, dtype=int)
        return StackedDesign(self.vectors[index], self.block_dims, self.responses[index])


@dataclass(eq=False)
class CovariancePair:
    """
    Empirical covariance Ĉ₁ (d×d) and cross-covariance Ĉ₁₂ (d×q), divisor n.

    Attributes:
        c1: Covariance of the design vectors.
        c12: Cross-covariance of design vectors and responses.
        mean_x: Sample mean of the design vectors.
        mean_y: Sample mean of the responses.
        block_dims: d_1..d_p.
        n: Sample size the moments were computed from.
    """

    c1: np.ndarray
    c12: np.ndarray
    mean_x: np.ndarray
    mean_y: np.ndarray
    block_dims: Tuple[int, ...]
    n: int

    @property
    def p(self) -> int:
        return len(self.block_dims)


@dataclass(frozen=True)
class VariableSubset:
    """Strictly increasing, non-empty set of 1-based variable indices."""

    indices: Tuple[int, ...]

    def __post_init__(self) -> None:
        indices = tuple(int(i) for i in self.indices)
        if not indices:
            raise ArgumentError("variable subset must be non-empty")
        if indices[0] < 1:
            raise ArgumentError(f"variable indices are 1-based, got {indices[0]}")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ArgumentError(f"variable indices must be strictly increasing, got {indices}")
        object.__setattr__(self, "indices", indices)

    @classmethod
    def of(cls, values: Iterable[int]) -> "VariableSubset":
        """Build from any iterable, sorting and removing duplicates."""
        return cls(tuple(sorted({int(v) for v in values})))

    @classmethod
    def full(cls, p: int) -> "VariableSubset":
        return cls(tuple(range(1, p + 1)))

    def check(self, p: int) -> "VariableSubset":
        if self.indices[-1] > p:
            raise ArgumentError(f"variable index {self.indices[-1]} out of range for p={p}")
        return self

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, item: object) -> bool:
        return item in self.indices

    def __str__(self) -> str:
        return "{" + ", ".join(str(i) for i in self.indices) + "}"


@dataclass(frozen=True)
class SelectionConfig:
    """
    Tuning pair and penalty choice for one selection run.

    Attributes:
        alpha: Exponent of the ordering penalty, 0 < α < 1/2.
        beta: Exponent of the cardinality penalty, 0 < β < 1/2.
        f: Id of the strictly decreasing penalty (see `penalties.DECREASING`).
        g: Id of the strictly increasing penalty (see `penalties.INCREASING`).
        penalty_scale: Positive factor applied to both penalties.
        penalty_reference: ``cross_covariance`` multiplies the penalties by
            ‖Ĉ₁₂‖_F so they follow the scale of ξ̂; ``absolute`` uses them as is.
        jitter: Relative ridge for the Cholesky rescue.
    """

    alpha: float = 0.25
    beta: float = 0.25
    f: str = "inverse"
    g: str = "linear"
    penalty_scale: float = 0.05
    penalty_reference: str = "cross_covariance"
    jitter: float = DEFAULT_JITTER

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not 0.0 < value < 0.5:
                raise ArgumentError(f"{name} must lie in (0, 1/2), got {value}")
        if self.penalty_scale <= 0:
            raise ArgumentError(f"penalty_scale must be positive, got {self.penalty_scale}")
        if self.penalty_reference not in PENALTY_REFERENCES:
            raise ArgumentError(
                f"penalty_reference must be one of {PENALTY_REFERENCES}, got {self.penalty_reference!r}"
            )
        if self.jitter < 0:
            raise ArgumentError(f"jitter must be non-negative, got {self.jitter}")
        resolve_decreasing(self.f)
        resolve_increasing(self.g)

    @property
    def f_fn(self) -> Penalty:
        return resolve_decreasing(self.f)

    @property
    def g_fn(self) -> Penalty:
        return resolve_increasing(self.g)

    def with_tuning(self, alpha: float, beta: float) -> "SelectionConfig":
        return replace(self, alpha=float(alpha), beta=float(beta))


@dataclass(frozen=True)
class SelectionResult:
    """
    Outcome of one selection run.

    Attributes:
        ordered: ν̂_1..ν̂_p, a permutation of 1..p.
        phi: φ̂_ℓ for ℓ = 1..p (indexed by variable).
        psi: ψ̂_ℓ for ℓ = 1..p (indexed by position in ``ordered``).
        d_hat: Estimated number of relevant variables D̂.
        selected: Î₁ = {ν̂_1, ..., ν̂_D̂} in ranking order; derived.
    """

    ordered: Tuple[int, ...]
    phi: Tuple[float, ...]
    psi: Tuple[float, ...]
    d_hat: int
    selected: Tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        p = len(self.ordered)
        assert sorted(self.ordered) == list(range(1, p + 1)), "ordering must be a permutation"
        assert len(self.phi) == p and len(self.psi) == p
        assert 1 <= self.d_hat <= p, "D̂ must lie in 1..p"
        ranked_phi = [self.phi[v - 1] for v in self.ordered]
        assert all(a >= b for a, b in zip(ranked_phi, ranked_phi[1:])), "φ̂ must decrease along the ordering"
        object.__setattr__(self, "selected", tuple(self.ordered[: self.d_hat]))

    @property
    def selected_set(self) -> VariableSubset:
        return VariableSubset.of(self.selected)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "selected": list(self.selected_set.indices),
            "ordered": list(self.ordered),
            "d_hat": self.d_hat,
            "phi": {str(ell): self.phi[ell - 1] for ell in range(1, len(self.phi) + 1)},
            "psi": list(self.psi),
        }


@dataclass(frozen=True)
class FoldPlan:
    """
    Partition of the training rows into V folds.

    Attributes:
        folds: V disjoint tuples of 0-based row indices covering 0..n-1.
    """

    folds: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        folds = tuple(tuple(sorted(int(i) for i in fold)) for fold in self.folds)
        if len(folds) < 2:
            raise ArgumentError(f"cross-validation needs V >= 2 folds, got {len(folds)}")
        if any(len(fold) == 0 for fold in folds):
            raise ArgumentError("folds must be non-empty")
        members = [i for fold in folds for i in fold]
        if len(set(members)) != len(members):
            raise ArgumentError("folds must be disjoint")
        if set(members) != set(range(len(members))):
            raise ArgumentError("folds must cover rows 0..n-1")
        sizes = [len(fold) for fold in folds]
        if max(sizes) - min(sizes) > 1:
            raise ArgumentError(f"fold sizes must differ by at most one, got {sizes}")
        object.__setattr__(self, "folds", folds)

    @property
    def n(self) -> int:
        return sum(len(fold) for fold in self.folds)

    @property
    def V(self) -> int:  # noqa: N802 - standard notation
        return len(self.folds)

    def complement(self, j: int) -> Tuple[int, ...]:
        """Rows outside fold ``j`` (0-based fold index)."""
        held = set(self.folds[j])
        return tuple(i for i in range(self.n) if i not in held)


DEFAULT_TUNING_VALUES: Tuple[float, ...] = tuple(round(0.05 * k, 2) for k in range(1, 10))


@dataclass(frozen=True)
class TuningGrid:
    """Candidate values of α and β, all strictly inside (0, 1/2)."""

    alphas: Tuple[float, ...] = DEFAULT_TUNING_VALUES
    betas: Tuple[float, ...] = DEFAULT_TUNING_VALUES

    def __post_init__(self) -> None:
        for name in ("alphas", "betas"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise ArgumentError(f"tuning grid {name} must be non-empty")
            bad = [v for v in values if not 0.0 < v < 0.5]
            if bad:
                raise ArgumentError(f"tuning grid {name} must lie in (0, 1/2), got {bad}")
            object.__setattr__(self, name, values)

    def points(self) -> List[Tuple[float, float]]:
        return [(a, b) for a in self.alphas for b in self.betas]

    def __len__(self) -> int:
        return len(self.alphas) * len(self.betas)


__all__ = [
    "SelectionError",
    "ArgumentError",
    "DataFormatError",
    "DomainError",
    "NumericalError",
    "StackedDesign",
    "CovariancePair",
    "VariableSubset",
    "SelectionConfig",
    "SelectionResult",
    "FoldPlan",
    "TuningGrid",
    "DEFAULT_TUNING_VALUES",
    "PENALTY_REFERENCES",
]
