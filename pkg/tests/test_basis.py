from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.functional import BasisFamily, BasisSpec, Interval, default_grid, eval_basis, gram, trapezoid_weights
from src.utils.errors import ArgumentError, DomainError


def _trapezoid_gram(spec: BasisSpec, n_points: int) -> np.ndarray:
    grid = default_grid(spec.interval, n_points)
    values = eval_basis(spec, grid)
    return values.T @ (trapezoid_weights(grid)[:, None] * values)


class TestEvalBasis:
    def test_fourier_first_function_is_constant(self):
        grid = np.array([0.0, 0.13, 0.5, 0.97])
        values = eval_basis(BasisSpec("fourier", 1), grid)
        assert values.shape == (4, 1)
        assert np.array_equal(values[:, 0], np.ones(4))

    def test_fourier_at_zero(self):
        values = eval_basis(BasisSpec("fourier", 3), [0.0, 1.0])
        np.testing.assert_allclose(values[0], [1.0, math.sqrt(2), math.sqrt(2)], rtol=0, atol=1e-15)

    def test_gaussian_equals_one_at_its_center(self):
        spec = BasisSpec("gaussian", 5)
        centers, _ = spec.gaussian_parameters()
        values = eval_basis(spec, centers)
        np.testing.assert_allclose(np.diag(values), np.ones(5), atol=1e-15)

    def test_bspline_partition_of_unity(self, unit_grid):
        values = eval_basis(BasisSpec("bspline", 7), unit_grid)
        np.testing.assert_allclose(values.sum(axis=1), np.ones(unit_grid.size), atol=1e-12)

    def test_grid_outside_interval_is_rejected(self):
        with pytest.raises(DomainError):
            eval_basis(BasisSpec("fourier", 3, Interval(0.0, 1.0)), [0.0, 0.5, 1.5])

    @pytest.mark.parametrize("grid", [[], [0.5], [0.0, 0.5, 0.4]])
    def test_bad_grids(self, grid):
        with pytest.raises(ArgumentError):
            eval_basis(BasisSpec("fourier", 2), grid)

    def test_family_is_parsed_from_text(self):
        assert BasisSpec("BSpline", 4).family is BasisFamily.BSPLINE
        with pytest.raises(ArgumentError):
            BasisSpec("wavelet", 4)

    def test_bspline_dimension_below_order(self):
        with pytest.raises(ArgumentError):
            BasisSpec("bspline", 3, bspline_order=4)


class TestGram:
    def test_fourier_gram_is_exact_identity(self):
        assert np.array_equal(gram(BasisSpec("fourier", 4)), np.eye(4))
        assert np.array_equal(gram(BasisSpec("fourier", 4), np.linspace(0, 1, 7)), np.eye(4))

    def test_fourier_orthonormal_on_other_interval(self):
        spec = BasisSpec("fourier", 4, Interval(0.0, 2.0))
        np.testing.assert_allclose(_trapezoid_gram(spec, 20001), np.eye(4), atol=1e-6)

    def test_gaussian_diagonal_is_sigma_sqrt_pi(self):
        spec = BasisSpec("gaussian", 5)
        _, widths = spec.gaussian_parameters()
        g = gram(spec)
        np.testing.assert_allclose(np.diag(g), math.sqrt(math.pi) * widths, rtol=0, atol=1e-12)

    def test_gaussian_equal_parameters(self):
        sigma = 0.3
        spec = BasisSpec("gaussian", 2, centers=(0.4, 0.4), widths=(sigma, sigma))
        expected = math.sqrt(2 * math.pi) * sigma**2 / (sigma * math.sqrt(2))
        np.testing.assert_allclose(gram(spec), np.full((2, 2), expected), atol=1e-12)

    def test_piecewise_constant_spline(self):
        spec = BasisSpec("bspline", 1, bspline_order=1)
        g = gram(spec, np.linspace(0.0, 1.0, 11))
        assert g.shape == (1, 1)
        assert g[0, 0] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("dimension, tolerance", [(4, 1e-4), (6, 2e-4)])
    def test_cubic_spline_matches_fine_reference(self, dimension, tolerance):
        # boundary error h²/12 · |f'(0)| is 1.5e-4 for the first d=6 spline
        spec = BasisSpec("bspline", dimension)
        coarse = gram(spec, np.linspace(0.0, 1.0, 101))
        reference = _trapezoid_gram(spec, 10001)
        np.testing.assert_allclose(coarse, reference, rtol=0, atol=tolerance)

    def test_trapezoid_error_shrinks_with_finer_grid(self):
        spec = BasisSpec("bspline", 8)
        reference = _trapezoid_gram(spec, 20001)
        errors = [np.max(np.abs(gram(spec, np.linspace(0, 1, n)) - reference)) for n in (51, 101, 201)]
        assert errors[0] > errors[1] > errors[2]

    def test_bspline_needs_grid(self):
        with pytest.raises(ArgumentError):
            gram(BasisSpec("bspline", 5))

    @pytest.mark.parametrize(
        "spec",
        [BasisSpec("fourier", 6), BasisSpec("bspline", 9), BasisSpec("gaussian", 7, scale=0.5)],
    )
    def test_symmetric_and_psd(self, spec, unit_grid):
        g = gram(spec, unit_grid)
        assert np.max(np.abs(g - g.T)) <= 1e-12 * (1 + np.max(np.abs(g)))
        assert np.linalg.eigvalsh(g).min() >= -1e-10 * np.trace(g)


def test_with_dimension_resets_gaussian_parameters():
    spec = BasisSpec("gaussian", 2, centers=(0.1, 0.9), widths=(0.2, 0.2))
    wider = spec.with_dimension(4)
    assert wider.centers is None and wider.widths is None
    assert wider.gaussian_parameters()[0].size == 4
