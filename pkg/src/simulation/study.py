"""
Monte Carlo study driver.

Each replication draws a training and a test sample of the same size from
independent substreams, tunes (α, β) by V-fold CV on the training sample,
selects on the test sample and records the selection with its test MSEP.
"""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.functional import BasisSpec, Interval
from src.selection.base import ArgumentError, SelectionError
from src.selection.tuning import PipelineConfig, tune_and_select

from .metrics import ReplicationReport, StudyMetrics, metrics, reports_frame
from .scenarios import Example, SampleKind, ScenarioSpec, generate

logger = logging.getLogger(__name__)

DEFAULT_REPLICATIONS = 50

# Stacked dimension caps that keep Σ d_ℓ below the CV fitting size at n = 50.
EXAMPLE_D_MAX: Dict[Example, int] = {Example.EX1: 4, Example.EX2: 15, Example.EX3: 5}


@dataclass
class StudyResult:
    """
    Aggregated outcome of one study cell (example, n, σ, basis).

    Attributes:
        scenario: Base scenario; replications vary its replication index.
        basis: Basis family used for every predictor.
        reports: Successful replications ordered by index.
        failures: (replication, message) for replications that raised.
        summary: CVP / FDR / MSIZE / MSEP summary, or None if all failed.
    """

    scenario: ScenarioSpec
    basis: str
    reports: List[ReplicationReport]
    failures: List[Tuple[int, str]] = field(default_factory=list)
    summary: Optional[StudyMetrics] = None

    @property
    def msep(self) -> np.ndarray:
        return np.array([r.msep for r in self.reports], dtype=float)

    def table_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {
            "example": self.scenario.example.value,
            "n": self.scenario.n,
            "sigma": self.scenario.sigma,
            "basis": self.basis,
        }
        if self.summary is None:
            row.update({"CVP": float("nan"), "FDR": float("nan"), "MSIZE": float("nan"), "replications": 0})
        else:
            row.update(self.summary.to_dict())
        row["failures"] = len(self.failures)
        return row

    def msep_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "example": self.scenario.example.value,
                "n": self.scenario.n,
                "sigma": self.scenario.sigma,
                "basis": self.basis,
                "replication": [r.replication for r in self.reports],
                "msep": self.msep,
            }
        )

    def replications_frame(self) -> pd.DataFrame:
        return reports_frame(self.reports)


def study_templates(scenario: ScenarioSpec, family: str = "fourier", bspline_order: int = 4) -> List[BasisSpec]:
    """One template per predictor of ``scenario`` on [0, 1]."""
    family = str(family).lower()
    dimension = bspline_order if family == "bspline" else 1
    return [
        BasisSpec(family, dimension, Interval(0.0, 1.0), bspline_order=bspline_order)
        for _ in range(scenario.p)
    ]


def replication_seed(seed: int, replication: int) -> int:
    """Fold-shuffle seed of one replication."""
    state = np.random.SeedSequence([int(seed), int(replication)]).generate_state(1, dtype=np.uint32)
    return int(state[0])


def run_replication(
    scenario: ScenarioSpec,
    replication: int,
    templates: Sequence[BasisSpec],
    config: PipelineConfig,
) -> ReplicationReport:
    """Generate, tune, select and score one replication."""
    training = generate(scenario.for_replication(replication, SampleKind.TRAINING))
    test = generate(scenario.for_replication(replication, SampleKind.TEST))
    replication_config = replace(config, seed=replication_seed(scenario.seed, replication))
    result = tune_and_select(training.dataset, test.dataset, templates, replication_config)
    return ReplicationReport(
        selected=result.selected,
        true_set=training.true_set.indices,
        msep=result.msep_test,
        p=scenario.p,
        replication=replication,
        alpha=result.alpha,
        beta=result.beta,
    )


def run_study(
    scenario: ScenarioSpec,
    replications: int = DEFAULT_REPLICATIONS,
    config: Optional[PipelineConfig] = None,
    *,
    family: str = "fourier",
    templates: Optional[Sequence[BasisSpec]] = None,
    max_workers: Optional[int] = None,
    verbose: bool = False,
) -> StudyResult:
    """
    Run ``replications`` independent replications of ``scenario``.

    A failing replication is recorded with its message and does not stop
    the study. Replications run on a thread pool; results are keyed by
    replication index so the output does not depend on ``max_workers``.
    Grid-point parallelism inside a replication is switched off.
    """
    if replications < 1:
        raise ArgumentError(f"a study needs at least one replication, got {replications}")
    config = config or PipelineConfig(d_max=EXAMPLE_D_MAX[scenario.example])
    config = replace(config, max_workers=1)
    templates = list(templates) if templates is not None else study_templates(scenario, family)
    if len(templates) != scenario.p:
        raise ArgumentError(f"{len(templates)} basis templates for {scenario.p} predictors")
    basis = templates[0].family.value if len({t.family for t in templates}) == 1 else "mixed"

    if verbose:
        print(f"\n🔍 Simulating {scenario.example.value}: n={scenario.n}, sigma={scenario.sigma}, basis={basis}")
        print(f"   Replications: {replications}, d_max={config.d_max}, folds={config.folds}")

    def _one(replication: int) -> Tuple[int, Optional[ReplicationReport], Optional[str]]:
        try:
            report = run_replication(scenario, replication, templates, config)
        except (SelectionError, np.linalg.LinAlgError) as exc:
            return replication, None, str(exc)
        if verbose:
            print(f"   ➔ replication {replication}: selected {set(report.selected)}, MSEP {report.msep:.4g}")
        return replication, report, None

    with ThreadPoolExecutor(max_workers=max_workers or 1) as pool:
        outcomes = list(pool.map(_one, range(replications)))

    reports = [report for _, report, _ in outcomes if report is not None]
    failures = [(r, message) for r, report, message in outcomes if report is None]
    for replication, message in failures:
        warnings.warn(f"Replication {replication} failed: {message}", UserWarning, stacklevel=2)
        logger.warning("replication %d failed: %s", replication, message)

    summary = metrics(reports) if reports else None
    if verbose:
        if summary is None:
            print("   ❌ every replication failed")
        else:
            print(f"   ✅ CVP={summary.cvp:.2f} FDR={summary.fdr:.2f} MSIZE={summary.msize:.2f}"
                  f" ({len(failures)} failed)")
    return StudyResult(scenario, basis, reports, failures, summary)


def run_grid(
    example: Example | str,
    ns: Sequence[int],
    sigmas: Sequence[float],
    bases: Sequence[str] = ("fourier",),
    replications: int = DEFAULT_REPLICATIONS,
    *,
    seed: int = 0,
    grid_points: int = 51,
    config: Optional[PipelineConfig] = None,
    max_workers: Optional[int] = None,
    verbose: bool = False,
) -> List[StudyResult]:
    """Studies for every (n, σ, basis) cell, ordered n-major, then σ, then basis."""
    example = Example(str(example).lower()) if not isinstance(example, Example) else example
    results: List[StudyResult] = []
    for n in ns:
        for sigma in sigmas:
            for basis in bases:
                scenario = ScenarioSpec(example, int(n), float(sigma), seed=seed, grid_points=grid_points)
                results.append(
                    run_study(
                        scenario,
                        replications,
                        config,
                        family=basis,
                        max_workers=max_workers,
                        verbose=verbose,
                    )
                )
    return results


def metrics_table(results: Sequence[StudyResult]) -> pd.DataFrame:
    """Rows n, sigma, basis, CVP, FDR, MSIZE (+ MSEP summary and failures)."""
    frame = pd.DataFrame([r.table_row() for r in results])
    leading = ["example", "n", "sigma", "basis", "CVP", "FDR", "MSIZE"]
    rest = [c for c in frame.columns if c not in leading]
    return frame[leading + rest]


def pipeline_config_for(example: Example | str, base: PipelineConfig, overrides: Mapping[str, Any]) -> PipelineConfig:
    """``base`` with the per-example ``d_max`` from ``overrides`` (or the built-in cap)."""
    example = Example(example.value if isinstance(example, Example) else str(example).lower())
    section = overrides.get(example.value, {}) or {}
    d_max = int(section.get("d_max", EXAMPLE_D_MAX[example]))
    return replace(base, d_max=d_max)


__all__ = [
    "DEFAULT_REPLICATIONS",
    "EXAMPLE_D_MAX",
    "StudyResult",
    "study_templates",
    "replication_seed",
    "run_replication",
    "run_study",
    "run_grid",
    "metrics_table",
    "pipeline_config_for",
]
