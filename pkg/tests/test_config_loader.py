from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.functional import BasisFamily, Interval
from src.selection.config_loader import (
    DEFAULT_CONFIG,
    WORKERS_ENV,
    basis_templates,
    load_selection_config,
    load_simulation_config,
    merge_config,
    pipeline_config_from_dict,
    resolve_workers,
)
from src.utils.errors import ArgumentError, DataFormatError


def test_merge_is_recursive_and_leaves_defaults_alone():
    merged = merge_config(DEFAULT_CONFIG, {"selection": {"f": "exp_decay"}, "folds": 10})
    assert merged["selection"]["f"] == "exp_decay"
    assert merged["selection"]["g"] == "linear"
    assert merged["folds"] == 10
    assert DEFAULT_CONFIG["selection"]["f"] == "inverse"


def test_missing_file_gives_defaults(tmp_path):
    assert load_selection_config(tmp_path / "absent.yaml") == merge_config(DEFAULT_CONFIG, {})


def test_file_then_overrides(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("d_max: 8\nseed: 4\n", encoding="utf-8")
    config = load_selection_config(path, {"seed": 9})
    assert (config["d_max"], config["seed"]) == (8, 9)


def test_invalid_yaml_reports_line(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("d_max: 8\ngrid: [0.1, 0.2\n", encoding="utf-8")
    with pytest.raises(DataFormatError, match=r"bad\.yaml:\d+:"):
        load_selection_config(path)


def test_top_level_must_be_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(DataFormatError):
        load_selection_config(path)


def test_simulation_defaults_layer():
    config = load_simulation_config(None, {"n": [80]})
    assert config["example"] == "ex2"
    assert config["n"] == [80]
    assert config["examples"]["ex1"]["d_max"] == 4
    assert config["folds"] == 5


def test_pipeline_config(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    config = load_selection_config(
        None, {"grid": {"alphas": [0.2], "betas": [0.1, 0.3]}, "selection": {"g": "sqrt"}, "cv_variant": "holdout"}
    )
    pipeline = pipeline_config_from_dict(config)
    assert len(pipeline.grid) == 2
    assert pipeline.selection.g == "sqrt"
    assert pipeline.cv_variant == "holdout"
    assert pipeline.max_workers == 1


def test_pipeline_defaults_scale_penalties_and_cap_dimensions(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    pipeline = pipeline_config_from_dict(load_selection_config(None))
    assert pipeline.cap_dimensions is True
    assert pipeline.selection.penalty_reference == "cross_covariance"
    assert pipeline.selection.penalty_scale == 0.05
    absolute = load_selection_config(None, {"selection": {"penalty_reference": "absolute"}, "cap_dimensions": False})
    pipeline = pipeline_config_from_dict(absolute)
    assert pipeline.selection.penalty_reference == "absolute"
    assert pipeline.cap_dimensions is False


def test_pipeline_config_rejects_bad_grid():
    config = load_selection_config(None, {"grid": {"alphas": [0.6], "betas": [0.1]}})
    with pytest.raises(ArgumentError):
        pipeline_config_from_dict(config)


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "4")
    assert resolve_workers({"workers": 1}) == 4
    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(ArgumentError):
        resolve_workers({})


def test_basis_templates_per_predictor():
    intervals = [Interval(0.0, 1.0), Interval(-1.0, 1.0)]
    config = load_selection_config(None, {"basis": {"family": ["bspline", "gaussian"], "bspline_order": 3}})
    templates = basis_templates(config, intervals)
    assert [t.family for t in templates] == [BasisFamily.BSPLINE, BasisFamily.GAUSSIAN]
    assert templates[0].dimension == 3
    assert templates[1].interval == Interval(-1.0, 1.0)
    with pytest.raises(ArgumentError):
        basis_templates(config, intervals[:1])
