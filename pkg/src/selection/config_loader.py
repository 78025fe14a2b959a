"""Helpers for loading selection and pipeline configuration from YAML."""

from __future__ import annotations

import copy
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import yaml

from src.functional import BasisSpec, Interval

from .base import ArgumentError, DataFormatError, SelectionConfig, TuningGrid
from .tuning import PipelineConfig

WORKERS_ENV = "MFLR_WORKERS"

DEFAULT_CONFIG: Dict[str, Any] = {
    "selection": {
        "f": "inverse",
        "g": "linear",
        "penalty_scale": 0.05,
        "penalty_reference": "cross_covariance",
        "jitter": 1e-10,
    },
    "basis": {
        "family": "fourier",
        "bspline_order": 4,
        "scale": 1.0,
    },
    "d_max": 15,
    "folds": 5,
    "test_fraction": 0.5,
    "seed": 0,
    "cv_variant": "in_fold",
    "center_msep": False,
    "final_on_full_sample": False,
    "cap_dimensions": True,
    "workers": 1,
    "grid": {
        "alphas": [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45],
        "betas": [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45],
    },
}


SIMULATION_DEFAULTS: Dict[str, Any] = {
    "example": "ex2",
    "replications": 50,
    "grid_points": 51,
    "n": [50],
    "sigma": [0.1],
    "bases": ["fourier"],
    "examples": {
        "ex1": {"d_max": 4},
        "ex2": {"d_max": 15},
        "ex3": {"d_max": 5},
    },
}


def load_yaml(path: Optional[str | Path]) -> Dict[str, Any]:
    """Load a YAML mapping; a missing file yields an empty mapping."""
    if path is None:
        return {}
    file_path = Path(path)
    if not file_path.exists():
        return {}
    try:
        with file_path.open("r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise DataFormatError(f"invalid YAML: {exc}", path=str(file_path), line=line) from exc
    if not isinstance(raw, dict):
        raise DataFormatError("top level must be a mapping", path=str(file_path))
    return raw


def merge_config(defaults: Mapping[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Recursively merge ``overrides`` over ``defaults`` (nested dicts key by key)."""
    merged = copy.deepcopy(dict(defaults))
    for key, value in (overrides or {}).items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = merge_config(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_selection_config(
    path: Optional[str | Path] = None, overrides: Optional[Mapping[str, Any]] = None
) -> Dict[str, Any]:
    """Defaults, then the YAML file, then explicit overrides (e.g. CLI flags)."""
    config = merge_config(DEFAULT_CONFIG, load_yaml(path))
    if overrides:
        config = merge_config(config, overrides)
    return config


def load_simulation_config(
    path: Optional[str | Path] = None, overrides: Optional[Mapping[str, Any]] = None
) -> Dict[str, Any]:
    """Selection defaults plus study settings, then the YAML file, then overrides."""
    config = merge_config(merge_config(DEFAULT_CONFIG, SIMULATION_DEFAULTS), load_yaml(path))
    if overrides:
        config = merge_config(config, overrides)
    return config


def resolve_workers(config: Mapping[str, Any]) -> int:
    """Worker count from the environment (``MFLR_WORKERS``) or the config."""
    raw = os.getenv(WORKERS_ENV, config.get("workers", 1))
    try:
        workers = int(raw)
    except (TypeError, ValueError):
        raise ArgumentError(f"worker count must be an integer, got {raw!r}") from None
    return max(1, workers)


def pipeline_config_from_dict(config: Mapping[str, Any]) -> PipelineConfig:
    """Build a `PipelineConfig` from a merged configuration mapping."""
    selection = config.get("selection", {})
    grid = config.get("grid", {})
    try:
        return PipelineConfig(
            d_max=int(config["d_max"]),
            folds=int(config["folds"]),
            test_fraction=float(config["test_fraction"]),
            seed=int(config["seed"]),
            cv_variant=str(config["cv_variant"]),
            center_msep=bool(config["center_msep"]),
            final_on_full_sample=bool(config["final_on_full_sample"]),
            cap_dimensions=bool(config["cap_dimensions"]),
            max_workers=resolve_workers(config),
            selection=SelectionConfig(
                f=str(selection["f"]),
                g=str(selection["g"]),
                penalty_scale=float(selection["penalty_scale"]),
                penalty_reference=str(selection["penalty_reference"]),
                jitter=float(selection["jitter"]),
            ),
            grid=TuningGrid(tuple(grid["alphas"]), tuple(grid["betas"])),
        )
    except (KeyError, TypeError) as exc:
        raise ArgumentError(f"incomplete configuration: {exc}") from exc


def basis_templates(
    config: Mapping[str, Any], intervals: Sequence[Interval]
) -> List[BasisSpec]:
    """
    One basis template per predictor.

    ``basis.family`` is either a single family or a list with one entry per
    predictor. Template dimensions are placeholders set to the family minimum.
    """
    basis = config.get("basis", {})
    families = basis.get("family", "fourier")
    p = len(intervals)
    if isinstance(families, str):
        families = [families] * p
    families = list(families)
    if len(families) != p:
        raise ArgumentError(f"{len(families)} basis families configured for {p} predictors")
    order = int(basis.get("bspline_order", 4))
    scale = float(basis.get("scale", 1.0))
    templates: List[BasisSpec] = []
    for family, interval in zip(families, intervals):
        family = str(family).lower()
        dimension = order if family == "bspline" else 1
        templates.append(
            BasisSpec(family, dimension, interval, bspline_order=order, scale=scale)
        )
    return templates


__all__ = [
    "WORKERS_ENV",
    "DEFAULT_CONFIG",
    "load_yaml",
    "merge_config",
    "SIMULATION_DEFAULTS",
    "load_selection_config",
    "load_simulation_config",
    "resolve_workers",
    "pipeline_config_from_dict",
    "basis_templates",
]
