from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.functional import BasisSpec
from src.selection import DesignBuilder
from src.simulation import Example, ScenarioSpec, generate
from src.utils.data_parsers import (
    read_curves,
    read_dataset,
    read_responses,
    write_curves,
    write_dataset,
    write_responses,
)
from src.utils.errors import DataFormatError


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


class TestCurveFiles:
    def test_round_trip_is_bit_exact(self, tmp_path, rng, unit_grid):
        values = rng.normal(size=(4, unit_grid.size)) * 1e3
        grid, read_back = read_curves(write_curves(tmp_path / "X1.csv", unit_grid, values))
        assert np.array_equal(grid, unit_grid)
        assert np.array_equal(read_back, values)

    def test_reports_line_of_bad_value(self, tmp_path):
        path = _write(tmp_path / "X1.csv", "0,0.5,1\n1,2,3\n4,abc,6\n")
        with pytest.raises(DataFormatError, match=r"X1\.csv:3: not a number: 'abc'"):
            read_curves(path)

    def test_row_length_mismatch(self, tmp_path):
        path = _write(tmp_path / "X1.csv", "0,0.5,1\n1,2,3\n4,5\n")
        with pytest.raises(DataFormatError, match=r":3: row has 2 values, grid has 3"):
            read_curves(path)

    def test_grid_must_increase(self, tmp_path):
        path = _write(tmp_path / "X1.csv", "0,1,0.5\n1,2,3\n")
        with pytest.raises(DataFormatError, match=r":1: grid row must be strictly increasing"):
            read_curves(path)

    def test_non_finite_value(self, tmp_path):
        path = _write(tmp_path / "X1.csv", "0,1\n1,nan\n")
        with pytest.raises(DataFormatError, match="non-finite"):
            read_curves(path)

    def test_missing_and_empty_files(self, tmp_path):
        with pytest.raises(DataFormatError, match="file not found"):
            read_curves(tmp_path / "absent.csv")
        with pytest.raises(DataFormatError, match="empty"):
            read_curves(_write(tmp_path / "blank.csv", "\n\n"))
        with pytest.raises(DataFormatError, match="no curve rows"):
            read_curves(_write(tmp_path / "grid_only.csv", "0,1\n"))

    def test_blank_lines_are_skipped(self, tmp_path):
        grid, values = read_curves(_write(tmp_path / "X1.csv", "0,1\n\n1,2\n\n3,4\n"))
        assert values.tolist() == [[1.0, 2.0], [3.0, 4.0]]


class TestResponses:
    def test_vector_is_one_column(self, tmp_path):
        matrix = read_responses(write_responses(tmp_path / "Y.csv", np.array([0.1, -2.5])))
        assert matrix.shape == (2, 1)

    def test_ragged_rows(self, tmp_path):
        with pytest.raises(DataFormatError, match=":2: row has 1 values, expected 2"):
            read_responses(_write(tmp_path / "Y.csv", "1,2\n3\n"))


class TestDatasets:
    def test_sample_count_mismatch(self, tmp_path):
        curves = write_curves(tmp_path / "X1.csv", [0.0, 1.0], np.ones((3, 2)))
        responses = write_responses(tmp_path / "Y.csv", np.ones(2))
        with pytest.raises(DataFormatError, match="3 curves but 2 response rows"):
            read_dataset([curves], responses)

    def test_written_sample_gives_identical_design(self, tmp_path):
        sample = generate(ScenarioSpec(Example.EX3, n=12, seed=5)).dataset
        data = write_dataset(tmp_path, sample)
        assert data == {"curves": [f"X{ell}.csv" for ell in range(1, 9)], "responses": "Y.csv"}
        loaded = read_dataset([tmp_path / name for name in data["curves"]], tmp_path / data["responses"])
        assert np.array_equal(loaded.responses, sample.responses)

        templates = [BasisSpec("fourier", 1)] * 8
        original = DesignBuilder(templates, 4, warn_degenerate=False).fit_transform(sample)
        reread = DesignBuilder(templates, 4, warn_degenerate=False).fit_transform(loaded)
        assert np.array_equal(original.vectors, reread.vectors)

    def test_intervals_are_applied(self, tmp_path):
        curves = write_curves(tmp_path / "X1.csv", [0.25, 0.5, 0.75], np.ones((2, 3)))
        responses = write_responses(tmp_path / "Y.csv", np.ones(2))
        dataset = read_dataset([curves], responses, [(0.0, 1.0)])
        assert (dataset.intervals[0].lo, dataset.intervals[0].hi) == (0.0, 1.0)
