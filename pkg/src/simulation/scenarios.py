"""
Synthetic functional regression scenarios.

Three generators with known relevant sets:

* ``ex1`` - p=10, q=1, random cosine series; relevant {1, 5, 6, 7, 10}.
* ``ex2`` - p=6, q=1, parametric curve families; relevant {1, 2, 5}.
* ``ex3`` - p=8, q=2, parametric curves observed with noise; relevant {3, 5, 7}.

Responses are Y_j = Σ_ℓ ∫ B_jℓ(t) X_ℓ(t) dt + ε_j with the integrals taken by
the trapezoid rule on the grid and ε_j ~ N(0, σ²).

Randomness comes from counter-based Philox streams keyed by
(seed, replication, sample kind, curve, role): every predictor and the
response noise draw from their own substream, so results do not depend on
thread count or on the order in which curves are generated.
N(a, b) below means mean a and variance b; U(a, b) has sorted bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from src.functional import FunctionalDataset, Interval
from src.functional.basis import trapezoid_weights, validate_grid
from src.selection.base import ArgumentError, VariableSubset


class Example(str, Enum):
    EX1 = "ex1"
    EX2 = "ex2"
    EX3 = "ex3"


class SampleKind(IntEnum):
    TRAINING = 0
    TEST = 1


class Role(IntEnum):
    CURVE = 0
    RESPONSE_NOISE = 1
    CURVE_NOISE = 2


@dataclass(frozen=True)
class ScenarioSpec:
    """
    One simulated sample.

    Attributes:
        example: Which generator to use.
        n: Sample size (≥ 2).
        sigma: Response noise standard deviation (> 0).
        seed: Base seed (64-bit).
        grid_points: Number of equispaced grid points on [0, 1].
        replication: Monte Carlo replication index.
        sample: Training or test draw of the replication.
    """

    example: Example
    n: int
    sigma: float = 0.1
    seed: int = 0
    grid_points: int = 51
    replication: int = 0
    sample: SampleKind = SampleKind.TRAINING

    def __post_init__(self) -> None:
        try:
            example = Example(str(self.example.value if isinstance(self.example, Enum) else self.example).lower())
        except ValueError as exc:
            raise ArgumentError(f"unknown example {self.example!r}") from exc
        object.__setattr__(self, "example", example)
        object.__setattr__(self, "sample", SampleKind(self.sample))
        if self.n < 2:
            raise ArgumentError(f"scenario needs n >= 2, got {self.n}")
        if not self.sigma > 0:
            raise ArgumentError(f"sigma must be positive, got {self.sigma}")
        if self.grid_points < 2:
            raise ArgumentError(f"grid_points must be >= 2, got {self.grid_points}")
        if self.seed < 0 or self.replication < 0:
            raise ArgumentError("seed and replication must be non-negative")

    @property
    def p(self) -> int:
        return GENERATORS[self.example].p

    @property
    def q(self) -> int:
        return GENERATORS[self.example].q

    @property
    def true_set(self) -> VariableSubset:
        return VariableSubset(GENERATORS[self.example].relevant)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_points)

    def for_replication(self, replication: int, sample: SampleKind) -> "ScenarioSpec":
        return replace(self, replication=replication, sample=sample)

    def stream(self, curve: int, role: Role) -> np.random.Generator:
        """Independent generator for one (curve, role) of this sample."""
        key = np.random.SeedSequence(
            [int(self.seed), int(self.replication), int(self.sample), int(curve), int(role)]
        )
        return np.random.Generator(np.random.Philox(key))


@dataclass(eq=False)
class SimulatedSample:
    """
    Generated dataset with its ground truth.

    Attributes:
        dataset: Curves and responses.
        true_set: Relevant predictors I₁ (1-based).
        coefficients: (q, p, N) coefficient functions on the grid.
        parameters: Random draws of the generator keyed ``X<ℓ>.<name>``.
    """

    dataset: FunctionalDataset
    true_set: VariableSubset
    coefficients: np.ndarray
    parameters: Dict[str, np.ndarray] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Quadrature and responses
# ---------------------------------------------------------------------------


def trapezoid_integral(f_values: Sequence[float], g_values: Sequence[float], grid: Sequence[float]) -> float:
    """Trapezoid approximation of ∫ f g dt from values on ``grid``."""
    f = np.asarray(f_values, dtype=float)
    g = np.asarray(g_values, dtype=float)
    points = np.asarray(grid, dtype=float)
    if f.shape != g.shape or f.shape != points.shape:
        raise ArgumentError(
            f"trapezoid needs equal lengths, got {f.size}, {g.size} values on {points.size} points"
        )
    points = validate_grid(points)
    return float(np.sum(trapezoid_weights(points) * f * g))


def synthesize_responses(
    curves: Sequence[np.ndarray],
    grid: Sequence[float],
    coefficients: np.ndarray,
    noise: np.ndarray,
) -> np.ndarray:
    """
    Y[i, j] = Σ_ℓ trapezoid(B_jℓ · X_ℓ^(i)) + noise[i, j].

    Args:
        curves: p arrays (n, N) of curve values.
        grid: Shared grid of length N.
        coefficients: (q, p, N) coefficient values.
        noise: (n, q) additive noise.
    """
    points = validate_grid(grid)
    weights = trapezoid_weights(points)
    coefficients = np.asarray(coefficients, dtype=float)
    q, p, _ = coefficients.shape
    if len(curves) != p:
        raise ArgumentError(f"{len(curves)} curve arrays for {p} coefficient functions")
    noise = np.asarray(noise, dtype=float).reshape(-1, q)
    responses = noise.copy()
    for ell, values in enumerate(curves):
        weighted = np.asarray(values, dtype=float) * weights
        responses += weighted @ coefficients[:, ell, :].T
    return responses


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def _normal(rng: np.random.Generator, mean: float, variance: float, n: int) -> np.ndarray:
    return rng.normal(mean, np.sqrt(variance), size=n)


def _uniform(rng: np.random.Generator, a: float, b: float, n: int) -> np.ndarray:
    return rng.uniform(min(a, b), max(a, b), size=n)


CurveFn = Callable[[np.random.Generator, np.ndarray, int], Tuple[np.ndarray, Dict[str, np.ndarray]]]


@dataclass(frozen=True)
class _Generator:
    p: int
    q: int
    relevant: Tuple[int, ...]
    curves: Tuple[CurveFn, ...]
    coefficients: Callable[[np.ndarray], np.ndarray]
    observation_noise: bool = False


# Example 1 ------------------------------------------------------------------

_EX1_TERMS = 50
_EX1_B = {1: 0.25, 5: 0.50, 6: 0.75, 7: 1.00, 10: 1.25}


def _ex1_curve(rng: np.random.Generator, t: np.ndarray, n: int):
    k = np.arange(1, _EX1_TERMS + 1)
    c = rng.standard_normal((n, _EX1_TERMS)) / k
    psi = np.sqrt(2.0) * np.cos(np.outer(k - 1, np.pi * t))
    psi[0] = 1.0
    return 5.0 * c @ psi, {"c": c}


def _ex1_coefficients(t: np.ndarray) -> np.ndarray:
    coef = np.zeros((1, 10, t.size))
    for ell, b in _EX1_B.items():
        coef[0, ell - 1] = b * np.sin(np.pi * ell * t / 10.0)
    return coef


# Example 2 ------------------------------------------------------------------


def _ex2_x1(rng, t, n):
    a1, a2 = _normal(rng, -2, 1, n), _uniform(rng, 2, 3, n)
    a3, a4 = rng.exponential(1.0, n), _normal(rng, 0, 0.1, n)
    values = a1[:, None] * t**3 + a2[:, None] * t**2 + a3[:, None] * t + a4[:, None]
    return values, {"a1": a1, "a2": a2, "a3": a3, "a4": a4}


def _ex2_x2(rng, t, n):
    b1, b2 = _uniform(rng, 3, 7, n), _normal(rng, 0, 1, n)
    values = b1[:, None] * np.sin(2 * np.pi * t / 3) + b2[:, None] * t
    return values, {"b1": b1, "b2": b2}


def _cubic_in_2t_minus_1(rng, t, n, prefix):
    c1, c2 = _normal(rng, -3, 1.2, n), _normal(rng, 2, 0.5, n)
    c3, c4 = _normal(rng, -2, 1, n), _normal(rng, 2, 1.5, n)
    s = 2 * t - 1
    values = c1[:, None] * s**3 + c2[:, None] * s**2 + c3[:, None] * s + c4[:, None]
    return values, {f"{prefix}1": c1, f"{prefix}2": c2, f"{prefix}3": c3, f"{prefix}4": c4}


def _ex2_x3(rng, t, n):
    return _cubic_in_2t_minus_1(rng, t, n, "c")


def _ex2_x4(rng, t, n):
    d1, d2, d3 = _uniform(rng, 2, 1, n), _normal(rng, 0, 1, n), rng.exponential(1.0, n)
    values = (t - d1[:, None]) ** 2 * np.cos(2 * np.pi * t / 3) + d2[:, None] * t + d3[:, None]
    return values, {"d1": d1, "d2": d2, "d3": d3}


def _ex2_x5(rng, t, n):
    e1, e2, e3 = _normal(rng, -5, 3, n), _normal(rng, 7, 1, n), _normal(rng, 0, 0.025, n)
    values = np.cos(2 * np.pi * (t - e1[:, None])) + e2[:, None] * t + e3[:, None]
    return values, {"e1": e1, "e2": e2, "e3": e3}


def _ex2_x6(rng, t, n):
    f1, f2 = _normal(rng, -4, 2, n), _uniform(rng, 0, 1, n)
    f3, f4 = _uniform(rng, 0, 0.5, n), _normal(rng, 0, 0.1, n)
    values = (
        f1[:, None] * t**8
        + np.cos(f2[:, None] * np.pi * t)
        + t**4 * np.sin(f3[:, None] * np.pi * t)
        + f4[:, None]
    )
    return values, {"f1": f1, "f2": f2, "f3": f3, "f4": f4}


def _ex2_coefficients(t: np.ndarray) -> np.ndarray:
    coef = np.zeros((1, 6, t.size))
    coef[0, 0] = t * np.sin(np.pi * t / 4)
    coef[0, 1] = np.cos(2 * np.pi * t) + t**2 + 1
    coef[0, 4] = np.exp(-2 * t) + t**3 - 1
    return coef


# Example 3 ------------------------------------------------------------------


def _ex3_u1(rng, t, n):
    return _cubic_in_2t_minus_1(rng, t, n, "a")


def _ex3_u2(rng, t, n):
    b1, b2 = _normal(rng, -4, 2, n), _uniform(rng, 0, 1, n)
    b3, b4 = _uniform(rng, 0, 0.5, n), _normal(rng, 0, 0.1, n)
    values = (
        b1[:, None] * t**8
        + np.cos(b2[:, None] * np.pi * t)
        + b3[:, None] * t**4 * np.sin(b3[:, None] * np.pi * t)
        + b4[:, None]
    )
    return values, {"b1": b1, "b2": b2, "b3": b3, "b4": b4}


def _ex3_u3(rng, t, n):
    c1, c2 = _normal(rng, -4, 3, n), _normal(rng, 7, 1.5, n)
    return c1[:, None] * np.cos(2 * np.pi * t) + c2[:, None], {"c1": c1, "c2": c2}


def _ex3_u4(rng, t, n):
    d1, d2 = _uniform(rng, 3, 7, n), _normal(rng, 0, 1, n)
    return d1[:, None] * np.sin(np.pi**2 * t / 3) + d2[:, None], {"d1": d1, "d2": d2}


def _ex3_u5(rng, t, n):
    e1, e2, e3 = _normal(rng, -3, 1.2, n), _normal(rng, 2, 0.5, n), _normal(rng, -2, 1, n)
    s = 2 * t - 1
    values = (
        e1[:, None] * np.cos(3 * np.pi * s) ** 3
        + e2[:, None] * np.cos(2 * np.pi * s) ** 2
        + e3[:, None] * np.cos(np.pi * s) ** 3
    )
    return values, {"e1": e1, "e2": e2, "e3": e3}


def _ex3_u6(rng, t, n):
    f1, f2 = _normal(rng, -2, 1, n), _normal(rng, 3, 1.5, n)
    values = f1[:, None] * np.sin(2 * np.pi**2 * t / 3) + f2[:, None] * np.cos(np.pi**2 * t / 3)
    return values, {"f1": f1, "f2": f2}


def _ex3_u7(rng, t, n):
    g1, g2 = _uniform(rng, 2, 7, n), _normal(rng, 2, 0.4, n)
    values = g1[:, None] * np.cos(2 * np.pi * (3 * t - 2)) + g2[:, None] * np.cos(np.pi * (3 * t - 2))
    return values, {"g1": g1, "g2": g2}


def _ex3_u8(rng, t, n):
    h1, h2, h3 = _normal(rng, 4, 2, n), _normal(rng, -3, 0.5, n), _normal(rng, 1, 1, n)
    s = 2 * t - 1
    values = h1[:, None] * np.cos(np.pi * s) + h2[:, None] * s + h3[:, None]
    return values, {"h1": h1, "h2": h2, "h3": h3}


def _ex3_coefficients(t: np.ndarray) -> np.ndarray:
    coef = np.zeros((2, 8, t.size))
    coef[0, 2] = 0.25 * np.sin(t)
    coef[0, 4] = 0.75 * np.sin(2 * t - 1)
    coef[0, 6] = 1.25 * np.sin(3 * t - 2)
    coef[1, 2] = 0.25 * np.cos(t)
    coef[1, 4] = 0.75 * np.cos(2 * t - 1) + (2 * t - 1) ** 2
    coef[1, 6] = 1.25 * np.cos(3 * t - 2) + (3 * t - 2) ** 4
    return coef


GENERATORS: Dict[Example, _Generator] = {
    Example.EX1: _Generator(
        p=10, q=1, relevant=(1, 5, 6, 7, 10), curves=(_ex1_curve,) * 10, coefficients=_ex1_coefficients
    ),
    Example.EX2: _Generator(
        p=6,
        q=1,
        relevant=(1, 2, 5),
        curves=(_ex2_x1, _ex2_x2, _ex2_x3, _ex2_x4, _ex2_x5, _ex2_x6),
        coefficients=_ex2_coefficients,
    ),
    Example.EX3: _Generator(
        p=8,
        q=2,
        relevant=(3, 5, 7),
        curves=(_ex3_u1, _ex3_u2, _ex3_u3, _ex3_u4, _ex3_u5, _ex3_u6, _ex3_u7, _ex3_u8),
        coefficients=_ex3_coefficients,
        observation_noise=True,
    ),
}


def coefficient_functions(example: Example | str, grid: Sequence[float]) -> np.ndarray:
    """(q, p, N) values of the coefficient functions B_jℓ on ``grid``."""
    return GENERATORS[Example(example)].coefficients(np.asarray(grid, dtype=float))


def generate(scenario: ScenarioSpec) -> SimulatedSample:
    """Draw one sample of ``scenario`` with its relevant set."""
    spec = GENERATORS[scenario.example]
    t = scenario.grid
    n = scenario.n

    curves: List[np.ndarray] = []
    parameters: Dict[str, np.ndarray] = {}
    for ell, curve_fn in enumerate(spec.curves, start=1):
        values, draws = curve_fn(scenario.stream(ell, Role.CURVE), t, n)
        if spec.observation_noise:
            # variance 0.025 × (max - min) of each noiseless curve
            spread = values.max(axis=1) - values.min(axis=1)
            eta_rng = scenario.stream(ell, Role.CURVE_NOISE)
            values = values + eta_rng.standard_normal(values.shape) * np.sqrt(0.025 * spread)[:, None]
        curves.append(values)
        parameters.update({f"X{ell}.{name}": value for name, value in draws.items()})

    coefficients = spec.coefficients(t)
    noise = scenario.stream(0, Role.RESPONSE_NOISE).normal(0.0, scenario.sigma, size=(n, spec.q))
    responses = synthesize_responses(curves, t, coefficients, noise)

    dataset = FunctionalDataset(
        grids=tuple(t for _ in curves),
        curves=tuple(curves),
        responses=responses,
        intervals=tuple(Interval(0.0, 1.0) for _ in curves),
    )
    return SimulatedSample(dataset, VariableSubset(spec.relevant), coefficients, parameters)


__all__ = [
    "Example",
    "SampleKind",
    "Role",
    "ScenarioSpec",
    "SimulatedSample",
    "GENERATORS",
    "trapezoid_integral",
    "synthesize_responses",
    "coefficient_functions",
    "generate",
]
