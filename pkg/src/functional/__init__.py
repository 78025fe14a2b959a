"""Basis families, curve expansions and functional datasets."""

from .basis import (
    BasisFamily,
    BasisSpec,
    Interval,
    default_grid,
    eval_basis,
    gram,
    trapezoid_weights,
    validate_grid,
)
from .dataset import FunctionalDataset
from .expansion import (
    DEFAULT_D_MAX,
    EXACT_FIT,
    CoordinateVector,
    CurveObservation,
    bic_score,
    candidate_dimensions,
    fit_coordinate_matrix,
    fit_coordinates,
    is_exact_fit,
    reconstruct,
    select_dimensions,
)

__all__ = [
    "BasisFamily",
    "BasisSpec",
    "Interval",
    "default_grid",
    "eval_basis",
    "gram",
    "trapezoid_weights",
    "validate_grid",
    "FunctionalDataset",
    "DEFAULT_D_MAX",
    "EXACT_FIT",
    "CoordinateVector",
    "CurveObservation",
    "bic_score",
    "candidate_dimensions",
    "fit_coordinate_matrix",
    "fit_coordinates",
    "is_exact_fit",
    "reconstruct",
    "select_dimensions",
]
