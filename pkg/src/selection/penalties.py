"""
Penalty functions for the ordering (f, strictly decreasing) and cardinality
(g, strictly increasing) statistics, looked up by id from config.
"""

from __future__ import annotations

import math
from typing import Callable, Dict

from src.utils.errors import ArgumentError

Penalty = Callable[[float], float]

DECREASING: Dict[str, Penalty] = {
    "inverse": lambda ell: 1.0 / ell,
    "inverse_sqrt": lambda ell: 1.0 / math.sqrt(ell),
    "exp_decay": lambda ell: math.exp(-ell),
}

INCREASING: Dict[str, Penalty] = {
    "linear": lambda m: float(m),
    "sqrt": lambda m: math.sqrt(m),
    "log1p": lambda m: math.log1p(m),
}


def resolve_decreasing(name: str) -> Penalty:
    try:
        return DECREASING[name]
    except KeyError:
        raise ArgumentError(
            f"unknown decreasing penalty {name!r}; choose from {sorted(DECREASING)}"
        ) from None


def resolve_increasing(name: str) -> Penalty:
    try:
        return INCREASING[name]
    except KeyError:
        raise ArgumentError(
            f"unknown increasing penalty {name!r}; choose from {sorted(INCREASING)}"
        ) from None


__all__ = ["Penalty", "DECREASING", "INCREASING", "resolve_decreasing", "resolve_increasing"]
