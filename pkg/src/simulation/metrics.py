"""Replication-level records and the coverage / false-discovery / size metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from src.selection.base import ArgumentError

MSEP_QUANTILES = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class ReplicationReport:
    """
    Outcome of one Monte Carlo replication.

    Attributes:
        selected: Selected predictors Î₁ (1-based, increasing).
        true_set: Relevant predictors I₁.
        msep: Test-sample MSEP of the selected set.
        p: Number of candidate predictors.
        replication: Replication index.
        alpha: Tuned α of this replication.
        beta: Tuned β of this replication.
    """

    selected: Tuple[int, ...]
    true_set: Tuple[int, ...]
    msep: float
    p: int
    replication: int = 0
    alpha: float = float("nan")
    beta: float = float("nan")
    size: int = field(init=False)

    def __post_init__(self) -> None:
        selected = tuple(sorted(int(i) for i in self.selected))
        true_set = tuple(sorted(int(i) for i in self.true_set))
        for label, indices in (("selected", selected), ("true", true_set)):
            if any(i < 1 or i > self.p for i in indices):
                raise ArgumentError(f"{label} set {indices} is not within 1..{self.p}")
        object.__setattr__(self, "selected", selected)
        object.__setattr__(self, "true_set", true_set)
        object.__setattr__(self, "size", len(selected))

    @property
    def covers_truth(self) -> bool:
        return set(self.true_set).issubset(self.selected)

    @property
    def false_discoveries(self) -> int:
        return len(set(self.selected) - set(self.true_set))

    def to_row(self) -> Dict[str, object]:
        return {
            "replication": self.replication,
            "selected": " ".join(str(i) for i in self.selected),
            "size": self.size,
            "covers": int(self.covers_truth),
            "false_discoveries": self.false_discoveries,
            "alpha": self.alpha,
            "beta": self.beta,
            "msep": self.msep,
        }


@dataclass(frozen=True)
class StudyMetrics:
    """
    Averages over replications.

    Attributes:
        cvp: Share of replications whose selection contains I₁.
        fdr: Mean of |Î ∖ I₁| / |Î|.
        msize: Mean |Î|.
        msep_summary: Mean, standard deviation and quantiles of the test MSEP.
        replications: Number of reports aggregated.
    """

    cvp: float
    fdr: float
    msize: float
    msep_summary: Dict[str, float]
    replications: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "CVP": self.cvp,
            "FDR": self.fdr,
            "MSIZE": self.msize,
            "replications": self.replications,
            **{f"msep_{key}": value for key, value in self.msep_summary.items()},
        }


def summarize_msep(values: Iterable[float]) -> Dict[str, float]:
    """Mean, standard deviation and the boxplot quantiles of finite MSEP values."""
    data = np.asarray([v for v in values if np.isfinite(v)], dtype=float)
    if data.size == 0:
        return {"mean": float("nan"), "std": float("nan"), "min": float("nan"), "q25": float("nan"),
                "median": float("nan"), "q75": float("nan"), "max": float("nan")}
    low, q25, median, q75, high = np.quantile(data, MSEP_QUANTILES)
    return {
        "mean": float(data.mean()),
        "std": float(data.std(ddof=1)) if data.size > 1 else 0.0,
        "min": float(low),
        "q25": float(q25),
        "median": float(median),
        "q75": float(q75),
        "max": float(high),
    }


def metrics(reports: Sequence[ReplicationReport]) -> StudyMetrics:
    """Aggregate replication reports into CVP, FDR, MSIZE and an MSEP summary."""
    if len(reports) == 0:
        raise ArgumentError("metrics need at least one replication report")
    for report in reports:
        if report.size == 0:
            raise ArgumentError(f"replication {report.replication} selected no variable")

    covers = np.array([r.covers_truth for r in reports], dtype=float)
    fdr = np.array([r.false_discoveries / r.size for r in reports], dtype=float)
    sizes = np.array([r.size for r in reports], dtype=float)
    return StudyMetrics(
        cvp=float(covers.mean()),
        fdr=float(fdr.mean()),
        msize=float(sizes.mean()),
        msep_summary=summarize_msep(r.msep for r in reports),
        replications=len(reports),
    )


def reports_frame(reports: Sequence[ReplicationReport]) -> pd.DataFrame:
    """One row per replication, ordered by replication index."""
    rows: List[Dict[str, object]] = [r.to_row() for r in sorted(reports, key=lambda r: r.replication)]
    columns = ["replication", "selected", "size", "covers", "false_discoveries", "alpha", "beta", "msep"]
    return pd.DataFrame(rows, columns=columns)


__all__ = [
    "MSEP_QUANTILES",
    "ReplicationReport",
    "StudyMetrics",
    "summarize_msep",
    "metrics",
    "reports_frame",
]
