from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import src.simulation.study as study
from src.selection import NumericalError, PipelineConfig, TuningGrid
from src.selection.tuning import tune_and_select
from src.simulation import (
    METRIC_COLUMNS,
    Example,
    ReplicationReport,
    SampleKind,
    ScenarioSpec,
    decimals_for,
    format_metrics_table,
    generate,
    markdown_summary,
    metrics,
    metrics_table,
    run_grid,
    run_study,
    study_templates,
    summarize_msep,
)
from src.utils.errors import ArgumentError

QUICK = PipelineConfig(d_max=3, folds=3, grid=TuningGrid((0.1, 0.3), (0.1, 0.3)))


def _report(selected, true_set=(1, 2), msep=1.0, replication=0, p=6):
    return ReplicationReport(selected, true_set, msep, p, replication=replication)


class TestMetrics:
    def test_exact_recovery(self):
        summary = metrics([_report((1, 2)), _report((2, 1), replication=1)])
        assert (summary.cvp, summary.fdr, summary.msize) == (1.0, 0.0, 2.0)

    def test_mixed_outcomes(self):
        reports = [_report((1, 2, 3)), _report((1,), replication=1), _report((3, 4), replication=2)]
        summary = metrics(reports)
        assert summary.cvp == pytest.approx(1.0 / 3.0)
        assert summary.fdr == pytest.approx((1.0 / 3.0 + 0.0 + 1.0) / 3.0)
        assert summary.msize == pytest.approx(2.0)
        assert summary.replications == 3

    def test_report_fields(self):
        report = _report((3, 1, 2), replication=4)
        assert report.selected == (1, 2, 3)
        assert report.covers_truth and report.false_discoveries == 1 and report.size == 3
        assert report.to_row()["selected"] == "1 2 3"

    def test_empty_inputs(self):
        with pytest.raises(ArgumentError):
            metrics([])
        with pytest.raises(ArgumentError):
            metrics([_report(())])

    def test_out_of_range_indices(self):
        with pytest.raises(ArgumentError):
            _report((0, 1))
        with pytest.raises(ArgumentError):
            _report((1, 7))

    def test_msep_summary(self):
        summary = summarize_msep([1.0, 2.0, 3.0, 4.0, 5.0, float("nan")])
        assert summary["mean"] == 3.0 and summary["median"] == 3.0
        assert (summary["min"], summary["max"]) == (1.0, 5.0)
        assert (summary["q25"], summary["q75"]) == (2.0, 4.0)
        assert summary["std"] == pytest.approx(np.std([1, 2, 3, 4, 5], ddof=1))
        assert np.isnan(summarize_msep([])["mean"])


class TestReporting:
    def _table(self):
        return pd.DataFrame(
            [
                {"example": "ex1", "n": 50, "sigma": 0.1, "basis": "fourier", "CVP": 1.0, "FDR": 0.2142857, "MSIZE": 4.0},
                {"example": "ex1", "n": 100, "sigma": 0.5, "basis": "bspline", "CVP": 0.96, "FDR": 0.0, "MSIZE": 3.995},
            ]
        )

    def test_fixed_decimals(self):
        formatted = format_metrics_table(self._table(), 2)
        assert list(formatted.columns) == METRIC_COLUMNS
        assert formatted.loc[0, ["CVP", "FDR", "MSIZE"]].tolist() == ["1.00", "0.21", "4.00"]
        assert formatted.loc[1, "sigma"] == "0.5"

    def test_second_example_uses_three_decimals(self):
        assert decimals_for("ex2") == 3 and decimals_for("EX3") == 2
        assert format_metrics_table(self._table(), 3).loc[0, "FDR"] == "0.214"

    def test_missing_columns(self):
        with pytest.raises(ArgumentError):
            format_metrics_table(self._table().drop(columns=["MSIZE"]))

    def test_markdown(self):
        text = markdown_summary(self._table(), "Example 1")
        lines = text.splitlines()
        assert lines[0] == "## Example 1"
        assert lines[2] == "| n | sigma | basis | CVP | FDR | MSIZE |"
        assert lines[4] == "| 50 | 0.1 | fourier | 1.00 | 0.21 | 4.00 |"


class TestStudy:
    def test_templates_follow_family(self):
        scenario = ScenarioSpec(Example.EX3, n=10)
        templates = study_templates(scenario, "bspline")
        assert len(templates) == 8
        assert all(t.dimension == 4 for t in templates)

    def test_single_replication_matches_manual_run(self):
        scenario = ScenarioSpec(Example.EX2, n=40, seed=11)
        result = run_study(scenario, 1, QUICK)
        training = generate(scenario.for_replication(0, SampleKind.TRAINING))
        test = generate(scenario.for_replication(0, SampleKind.TEST))
        config = PipelineConfig(
            d_max=3, folds=3, grid=QUICK.grid, seed=study.replication_seed(11, 0), max_workers=1
        )
        manual = tune_and_select(training.dataset, test.dataset, study_templates(scenario), config)
        assert result.reports[0].selected == tuple(sorted(manual.selected))
        assert result.reports[0].msep == manual.msep_test
        assert result.summary.replications == 1
        assert result.failures == []

    def test_worker_count_does_not_change_results(self):
        scenario = ScenarioSpec(Example.EX2, n=30, seed=2)
        serial = run_study(scenario, 3, QUICK, max_workers=1)
        threaded = run_study(scenario, 3, QUICK, max_workers=3)
        pd.testing.assert_frame_equal(serial.replications_frame(), threaded.replications_frame())

    def test_failures_are_recorded(self, monkeypatch):
        original = study.run_replication

        def flaky(scenario, replication, templates, config):
            if replication == 1:
                raise NumericalError("matrix is singular")
            return original(scenario, replication, templates, config)

        monkeypatch.setattr(study, "run_replication", flaky)
        with pytest.warns(UserWarning, match="Replication 1 failed"):
            result = run_study(ScenarioSpec(Example.EX2, n=30), 3, QUICK)
        assert [r.replication for r in result.reports] == [0, 2]
        assert result.failures == [(1, "matrix is singular")]
        assert result.table_row()["failures"] == 1

    def test_all_failures_leave_no_summary(self, monkeypatch):
        def broken(*args):
            raise NumericalError("singular")

        monkeypatch.setattr(study, "run_replication", broken)
        with pytest.warns(UserWarning):
            result = run_study(ScenarioSpec(Example.EX2, n=30), 2, QUICK)
        assert result.summary is None
        assert np.isnan(result.table_row()["CVP"])

    def test_rejects_zero_replications(self):
        with pytest.raises(ArgumentError):
            run_study(ScenarioSpec(Example.EX2, n=30), 0, QUICK)

    def test_grid_layout(self):
        results = run_grid("ex2", [30], [0.1, 0.5], ["fourier"], 1, config=QUICK)
        table = metrics_table(results)
        assert list(table.columns[:7]) == ["example", "n", "sigma", "basis", "CVP", "FDR", "MSIZE"]
        assert table["sigma"].tolist() == [0.1, 0.5]


def _acceptance(example, n, sigma, d_max):
    config = PipelineConfig(d_max=d_max)
    return run_study(ScenarioSpec(example, n=n, sigma=sigma), 50, config, max_workers=4).summary


@pytest.mark.slow
def test_second_example_is_recovered():
    summary = _acceptance(Example.EX2, 100, 0.1, 15)
    assert summary.cvp >= 0.9
    assert summary.fdr <= 0.6
    assert 4.5 <= summary.msize <= 6.5


@pytest.mark.slow
def test_third_example_multivariate_response():
    summary = _acceptance(Example.EX3, 50, 0.1, 5)
    assert 0.5 <= summary.cvp <= 1.0
    assert 2.0 <= summary.msize <= 4.5


@pytest.mark.slow
def test_first_example_model_size():
    summary = _acceptance(Example.EX1, 50, 0.1, 4)
    assert 3.0 <= summary.msize <= 6.0
    assert summary.fdr <= 0.5
