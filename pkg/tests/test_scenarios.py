from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.selection import ArgumentError
from src.simulation import (
    Example,
    Role,
    SampleKind,
    ScenarioSpec,
    coefficient_functions,
    generate,
    synthesize_responses,
    trapezoid_integral,
)


class TestTrapezoid:
    def test_constant(self):
        grid = np.linspace(0.0, 1.0, 11)
        assert trapezoid_integral(np.ones(11), np.ones(11), grid) == pytest.approx(1.0, abs=1e-15)

    def test_linear_is_exact(self):
        grid = np.linspace(0.0, 1.0, 11)
        assert trapezoid_integral(grid, np.ones(11), grid) == pytest.approx(0.5, abs=1e-15)

    def test_three_points(self):
        grid = np.array([0.0, 0.5, 1.0])
        assert trapezoid_integral(grid, grid, grid) == pytest.approx(0.375, abs=1e-15)

    def test_bilinear(self, rng, unit_grid):
        f, g, h = rng.normal(size=(3, unit_grid.size))
        lhs = trapezoid_integral(2.0 * f + 3.0 * h, g, unit_grid)
        rhs = 2.0 * trapezoid_integral(f, g, unit_grid) + 3.0 * trapezoid_integral(h, g, unit_grid)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
        assert trapezoid_integral(f, g, unit_grid) == pytest.approx(trapezoid_integral(g, f, unit_grid), rel=1e-14)

    def test_length_mismatch(self):
        with pytest.raises(ArgumentError):
            trapezoid_integral(np.ones(4), np.ones(5), np.linspace(0, 1, 5))


class TestScenarioSpec:
    @pytest.mark.parametrize(
        "example, p, q, relevant",
        [
            (Example.EX1, 10, 1, (1, 5, 6, 7, 10)),
            (Example.EX2, 6, 1, (1, 2, 5)),
            (Example.EX3, 8, 2, (3, 5, 7)),
        ],
    )
    def test_shapes_and_truth(self, example, p, q, relevant):
        scenario = ScenarioSpec(example, n=7, grid_points=31)
        sample = generate(scenario)
        assert (scenario.p, scenario.q) == (p, q)
        assert sample.true_set.indices == relevant == scenario.true_set.indices
        assert sample.dataset.p == p and sample.dataset.q == q and sample.dataset.n == 7
        assert all(curve.shape == (7, 31) for curve in sample.dataset.curves)
        assert sample.coefficients.shape == (q, p, 31)

    def test_example_from_text(self):
        assert ScenarioSpec("EX2", n=5).example is Example.EX2

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"example": "ex4", "n": 10},
            {"example": "ex1", "n": 1},
            {"example": "ex1", "n": 10, "sigma": 0.0},
            {"example": "ex1", "n": 10, "grid_points": 1},
            {"example": "ex1", "n": 10, "seed": -1},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ArgumentError):
            ScenarioSpec(**kwargs)

    def test_irrelevant_coefficients_vanish(self, unit_grid):
        coef = coefficient_functions("ex2", unit_grid)
        for ell in (3, 4, 6):
            assert not coef[0, ell - 1].any()
        assert all(coef[0, ell - 1].any() for ell in (1, 2, 5))


class TestGeneration:
    def test_deterministic(self):
        scenario = ScenarioSpec(Example.EX3, n=9, seed=42)
        first, second = generate(scenario).dataset, generate(scenario).dataset
        for a, b in zip(first.curves, second.curves):
            assert np.array_equal(a, b)
        assert np.array_equal(first.responses, second.responses)

    def test_replications_and_samples_differ(self):
        scenario = ScenarioSpec(Example.EX2, n=9, seed=42)
        base = generate(scenario).dataset.responses
        other_rep = generate(scenario.for_replication(1, SampleKind.TRAINING)).dataset.responses
        test_draw = generate(scenario.for_replication(0, SampleKind.TEST)).dataset.responses
        assert not np.array_equal(base, other_rep)
        assert not np.array_equal(base, test_draw)

    def test_noise_level_leaves_curves_untouched(self):
        low = generate(ScenarioSpec(Example.EX2, n=15, sigma=0.1, seed=3))
        high = generate(ScenarioSpec(Example.EX2, n=15, sigma=0.2, seed=3))
        for a, b in zip(low.dataset.curves, high.dataset.curves):
            assert np.array_equal(a, b)
        signal = synthesize_responses(list(low.dataset.curves), low.dataset.grids[0], low.coefficients, np.zeros((15, 1)))
        np.testing.assert_allclose(high.dataset.responses - signal, 2.0 * (low.dataset.responses - signal), atol=1e-12)

    def test_responses_follow_the_model(self):
        scenario = ScenarioSpec(Example.EX3, n=6, sigma=0.3, seed=8)
        sample = generate(scenario)
        grid = scenario.grid
        noise = scenario.stream(0, Role.RESPONSE_NOISE).normal(0.0, 0.3, size=(6, 2))
        for i in range(6):
            for j in range(2):
                expected = noise[i, j] + sum(
                    trapezoid_integral(sample.coefficients[j, ell], sample.dataset.curves[ell][i], grid)
                    for ell in range(8)
                )
                assert sample.dataset.responses[i, j] == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_irrelevant_curves_do_not_move_responses(self):
        sample = generate(ScenarioSpec(Example.EX2, n=10, seed=1))
        curves = list(sample.dataset.curves)
        noise = np.zeros((10, 1))
        grid = sample.dataset.grids[0]
        base = synthesize_responses(curves, grid, sample.coefficients, noise)
        curves[2] = curves[2] + 100.0
        curves[5] = -curves[5]
        assert np.array_equal(synthesize_responses(curves, grid, sample.coefficients, noise), base)

    def test_parameter_draws_follow_their_laws(self):
        sample = generate(ScenarioSpec(Example.EX2, n=1000, seed=12))
        a2 = sample.parameters["X1.a2"]
        assert a2.min() >= 2.0 and a2.max() <= 3.0
        assert abs(a2.mean() - 2.5) <= 3.0 * np.sqrt(1.0 / 12.0) / np.sqrt(1000)
        a1 = sample.parameters["X1.a1"]
        assert abs(a1.mean() + 2.0) <= 3.0 / np.sqrt(1000)
        d1 = sample.parameters["X4.d1"]
        assert d1.min() >= 1.0 and d1.max() <= 2.0

    def test_curve_substreams_are_independent_of_other_predictors(self):
        sample = generate(ScenarioSpec(Example.EX1, n=5, seed=4))
        scenario = ScenarioSpec(Example.EX1, n=5, seed=4)
        c = scenario.stream(3, Role.CURVE).standard_normal((5, 50)) / np.arange(1, 51)
        np.testing.assert_array_equal(sample.parameters["X3.c"], c)

    def test_third_example_adds_scaled_observation_noise(self):
        scenario = ScenarioSpec(Example.EX3, n=200, seed=6)
        sample = generate(scenario)
        # X3 = c1 cos(2πt) + c2 exactly before the added noise
        curve = sample.dataset.curves[2]
        params = sample.parameters
        noiseless = params["X3.c1"][:, None] * np.cos(2 * np.pi * scenario.grid) + params["X3.c2"][:, None]
        residual = curve - noiseless
        spread = noiseless.max(axis=1) - noiseless.min(axis=1)
        standardized = residual / np.sqrt(0.025 * spread)[:, None]
        assert abs(standardized.std() - 1.0) < 0.05
