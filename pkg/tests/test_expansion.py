from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.functional import (
    EXACT_FIT,
    BasisSpec,
    CoordinateVector,
    CurveObservation,
    bic_score,
    candidate_dimensions,
    eval_basis,
    fit_coordinate_matrix,
    fit_coordinates,
    is_exact_fit,
    reconstruct,
    select_dimensions,
)
from src.simulation import Example, ScenarioSpec, generate
from src.utils.errors import NumericalError


def _brute_force_dimension(values: np.ndarray, grid: np.ndarray, d_max: int) -> int:
    n_points = grid.size
    scores = []
    for m in range(1, d_max + 1):
        design = np.column_stack(
            [np.ones(n_points)] + [math.sqrt(2) * np.cos(k * math.pi * grid) for k in range(1, m)]
        )
        coef = np.linalg.lstsq(design, values, rcond=None)[0]
        rss = float(np.sum((values - design @ coef) ** 2))
        scores.append(math.log(rss) + (m + 1) * math.log(n_points) / n_points)
    return 1 + int(np.argmin(scores))


class TestCoordinates:
    def test_basis_column_gives_unit_vector(self, unit_grid):
        spec = BasisSpec("fourier", 5)
        values = eval_basis(spec, unit_grid)
        for k in range(5):
            coords = fit_coordinates(CurveObservation(unit_grid, values[:, k]), spec)
            expected = np.zeros(5)
            expected[k] = 1.0
            np.testing.assert_allclose(coords.coords, expected, atol=1e-10)

    def test_zero_curve(self, unit_grid):
        coords = fit_coordinates(CurveObservation(unit_grid, np.zeros(unit_grid.size)), BasisSpec("bspline", 6))
        assert np.array_equal(coords.coords, np.zeros(6))

    def test_cubic_lies_in_spline_span(self, unit_grid, rng):
        a, b, c, d = rng.normal(size=4)
        values = a * unit_grid**3 + b * unit_grid**2 + c * unit_grid + d
        spec = BasisSpec("bspline", 8)
        fitted = reconstruct(fit_coordinates(CurveObservation(unit_grid, values), spec), spec, unit_grid)
        assert np.sum((values - fitted) ** 2) <= 1e-16 * np.sum(values**2)

    def test_reconstruction_is_idempotent(self, unit_grid, rng):
        spec = BasisSpec("gaussian", 6)
        curve = CurveObservation(unit_grid, rng.normal(size=unit_grid.size))
        first = fit_coordinates(curve, spec)
        second = fit_coordinates(CurveObservation(unit_grid, reconstruct(first, spec, unit_grid)), spec)
        np.testing.assert_allclose(second.coords, first.coords, atol=1e-10)

    def test_matrix_fit_matches_per_curve_fit(self, unit_grid, rng):
        spec = BasisSpec("fourier", 4)
        values = rng.normal(size=(3, unit_grid.size))
        matrix = fit_coordinate_matrix(values, unit_grid, spec)
        for i in range(3):
            single = fit_coordinates(CurveObservation(unit_grid, values[i]), spec)
            np.testing.assert_allclose(matrix[i], single.coords, atol=1e-12)

    def test_dimension_above_grid_size(self):
        grid = np.linspace(0, 1, 5)
        with pytest.raises(NumericalError):
            fit_coordinates(CurveObservation(grid, np.sin(grid)), BasisSpec("fourier", 8))

    def test_non_finite_coordinates(self):
        with pytest.raises(NumericalError):
            CoordinateVector(np.array([1.0, np.nan]))


class TestBic:
    def test_exact_fit_sentinel(self, unit_grid):
        spec = BasisSpec("fourier", 3)
        values = eval_basis(spec, unit_grid) @ np.array([1.0, -2.0, 0.5])
        score = bic_score(CurveObservation(unit_grid, values), spec)
        assert score == EXACT_FIT
        assert is_exact_fit(score)

    def test_penalty_term(self, unit_grid, rng):
        values = rng.normal(size=unit_grid.size)
        spec = BasisSpec("fourier", 3)
        design = eval_basis(spec, unit_grid)
        coef = np.linalg.lstsq(design, values, rcond=None)[0]
        rss = float(np.sum((values - design @ coef) ** 2))
        expected = math.log(rss) + 4 * math.log(51) / 51
        assert bic_score(CurveObservation(unit_grid, values), spec) == pytest.approx(expected, rel=1e-12)

    def test_candidate_dimensions_start_at_family_minimum(self):
        assert candidate_dimensions(BasisSpec("bspline", 4), 2) == [4]
        assert candidate_dimensions(BasisSpec("fourier", 1), 3) == [1, 2, 3]


class TestSelectDimensions:
    def test_constant_curve_picks_one(self, unit_grid):
        sample = [[CurveObservation(unit_grid, np.ones(unit_grid.size))]]
        assert select_dimensions(sample, [BasisSpec("fourier", 1)], d_max=6) == [1]

    def test_max_over_curves(self, unit_grid):
        basis = eval_basis(BasisSpec("fourier", 5), unit_grid)
        three = CurveObservation(unit_grid, basis[:, :3] @ np.array([1.0, 0.7, -0.4]))
        five = CurveObservation(unit_grid, basis @ np.array([0.5, 1.0, -1.0, 0.8, 0.6]))
        spec = BasisSpec("fourier", 1)
        assert select_dimensions([[three]], [spec], d_max=10) == [3]
        assert select_dimensions([[five]], [spec], d_max=10) == [5]
        assert select_dimensions([[three], [five]], [spec], d_max=10) == [5]

    def test_ragged_grids_use_per_curve_scan(self):
        spec = BasisSpec("fourier", 1)
        grid_a = np.linspace(0, 1, 41)
        grid_b = np.linspace(0, 1, 61)
        a = CurveObservation(grid_a, eval_basis(BasisSpec("fourier", 2), grid_a) @ np.array([1.0, 1.0]))
        b = CurveObservation(grid_b, eval_basis(BasisSpec("fourier", 4), grid_b) @ np.array([1.0, 1.0, 1.0, 1.0]))
        assert select_dimensions([[a], [b]], [spec], d_max=8) == [4]

    def test_matches_brute_force_on_simulated_curves(self):
        sample = generate(ScenarioSpec(Example.EX1, n=20, sigma=0.1, seed=11)).dataset
        table = sample.observation_table()
        specs = [BasisSpec("fourier", 1)] * sample.p
        dims = select_dimensions(table, specs, d_max=15)
        for ell in range(sample.p):
            grid = sample.grids[ell]
            expected = max(_brute_force_dimension(sample.curves[ell][i], grid, 15) for i in range(sample.n))
            assert dims[ell] == expected

    def test_order_of_observations_does_not_matter(self):
        sample = generate(ScenarioSpec(Example.EX2, n=12, sigma=0.1, seed=5)).dataset
        table = sample.observation_table()
        specs = [BasisSpec("fourier", 1)] * sample.p
        assert select_dimensions(table, specs, 8) == select_dimensions(table[::-1], specs, 8, max_workers=3)

    def test_shared_grid_failure_names_the_predictor(self):
        grid = np.linspace(0, 1, 3)
        column = [CurveObservation(grid, np.array([0.0, 1.0, 0.5])), CurveObservation(grid, np.ones(3))]
        with pytest.raises(NumericalError) as info:
            select_dimensions([[c] for c in column], [BasisSpec("fourier", 1)], d_max=5)
        message = str(info.value)
        assert "predictor 1, 2 curves on a shared grid" in message
        assert "i=1" not in message

    def test_ragged_grid_failure_names_the_curve(self):
        short = np.linspace(0, 1, 3)
        long = np.linspace(0, 1, 11)
        column = [CurveObservation(long, np.sin(long)), CurveObservation(short, np.array([0.0, 1.0, 0.5]))]
        with pytest.raises(NumericalError, match=r"curve i=2, predictor 1"):
            select_dimensions([[c] for c in column], [BasisSpec("fourier", 1)], d_max=5)
