"""
Exception hierarchy shared by the basis, selection and simulation layers.

Every error raised by the library derives from `SelectionError` so callers
(the CLI in particular) can map failures to exit codes without inspecting
messages. Pipeline stages relabel lower-level errors with `at_stage` so the
final message says where the run broke.
"""

from __future__ import annotations

import copy
from typing import Optional


class SelectionError(RuntimeError):
    """Raised when a pipeline stage cannot complete its task."""

    def __init__(self, message: str, *, stage: Optional[str] = None) -> None:
        self.message = message
        self.stage = stage
        super().__init__(message)

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message

    def at_stage(self, stage: str) -> "SelectionError":
        """Return a copy of this error labelled with an enclosing stage."""
        clone = copy.copy(self)
        clone.stage = stage if not self.stage else f"{stage} > {self.stage}"
        return clone


class ArgumentError(SelectionError, ValueError):
    """Raised when inputs violate an operation's contract."""


class DomainError(ArgumentError):
    """Raised when grid points fall outside a basis interval."""


class NumericalError(SelectionError):
    """Raised on rank deficiency, non-PSD Gram matrices or singular solves."""


class DataFormatError(ArgumentError):
    """Raised when a data or config file cannot be parsed."""

    def __init__(
        self,
        message: str,
        *,
        path: Optional[str] = None,
        line: Optional[int] = None,
        stage: Optional[str] = None,
    ) -> None:
        self.path = path
        self.line = line
        location = path or "<input>"
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}", stage=stage)


__all__ = [
    "SelectionError",
    "ArgumentError",
    "DomainError",
    "NumericalError",
    "DataFormatError",
]
