"""Utility modules."""

from .errors import (
    ArgumentError,
    DataFormatError,
    DomainError,
    NumericalError,
    SelectionError,
)
from .linalg import solve_psd

__all__ = [
    "ArgumentError",
    "DataFormatError",
    "DomainError",
    "NumericalError",
    "SelectionError",
    "solve_psd",
]
