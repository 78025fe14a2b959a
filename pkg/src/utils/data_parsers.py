"""
Data Parsers - reading and writing curve and response files.

Curves file (one per predictor), comma-separated:
    t_1, t_2, ..., t_N          <- grid row
    x_1(t_1), ..., x_1(t_N)     <- one row per observation
    ...

Responses file: n rows of q comma-separated values, no header.

Floats are written with ``repr`` so a write/read round trip is bit exact.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.functional import FunctionalDataset, Interval
from src.utils.errors import DataFormatError


def _parse_rows(path: Path) -> List[Tuple[int, List[float]]]:
    """Numeric rows with their 1-based line numbers; blank lines are skipped."""
    if not path.exists():
        raise DataFormatError("file not found", path=str(path))
    rows: List[Tuple[int, List[float]]] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        for record in reader:
            if not record or all(not cell.strip() for cell in record):
                continue
            try:
                values = [float(cell) for cell in record]
            except ValueError:
                bad = next(cell for cell in record if not _is_float(cell))
                raise DataFormatError(f"not a number: {bad.strip()!r}", path=str(path), line=reader.line_num) from None
            if not all(np.isfinite(values)):
                raise DataFormatError("non-finite value", path=str(path), line=reader.line_num)
            rows.append((reader.line_num, values))
    if not rows:
        raise DataFormatError("file is empty", path=str(path))
    return rows


def _is_float(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_curves(path: str | Path) -> Tuple[np.ndarray, np.ndarray]:
    """Grid (N,) and curve values (n, N) of one predictor file."""
    file_path = Path(path)
    rows = _parse_rows(file_path)
    (grid_line, grid), body = rows[0], rows[1:]
    if len(grid) < 2:
        raise DataFormatError("grid row needs at least two points", path=str(file_path), line=grid_line)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DataFormatError("grid row must be strictly increasing", path=str(file_path), line=grid_line)
    if not body:
        raise DataFormatError("no curve rows after the grid row", path=str(file_path))
    for line, values in body:
        if len(values) != len(grid):
            raise DataFormatError(
                f"row has {len(values)} values, grid has {len(grid)}", path=str(file_path), line=line
            )
    return np.asarray(grid, dtype=float), np.asarray([values for _, values in body], dtype=float)


def read_responses(path: str | Path) -> np.ndarray:
    """(n, q) response matrix."""
    file_path = Path(path)
    rows = _parse_rows(file_path)
    width = len(rows[0][1])
    for line, values in rows:
        if len(values) != width:
            raise DataFormatError(f"row has {len(values)} values, expected {width}", path=str(file_path), line=line)
    return np.asarray([values for _, values in rows], dtype=float)


def _write_rows(path: Path, rows: Sequence[Sequence[float]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    return path


def write_curves(path: str | Path, grid: Sequence[float], values: np.ndarray) -> Path:
    return _write_rows(Path(path), [list(grid), *np.asarray(values, dtype=float).tolist()])


def write_responses(path: str | Path, responses: np.ndarray) -> Path:
    matrix = np.asarray(responses, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix[:, None]
    return _write_rows(Path(path), matrix.tolist())


def write_dataset(directory: str | Path, dataset: FunctionalDataset) -> Dict[str, object]:
    """
    Write ``X1.csv`` .. ``Xp.csv`` and ``Y.csv`` into ``directory``.

    Returns the ``data`` section of a selection config pointing at the files
    (paths relative to ``directory``).
    """
    root = Path(directory)
    curve_names: List[str] = []
    for ell, (grid, values) in enumerate(zip(dataset.grids, dataset.curves), start=1):
        name = f"X{ell}.csv"
        write_curves(root / name, grid, values)
        curve_names.append(name)
    write_responses(root / "Y.csv", dataset.responses)
    return {"curves": curve_names, "responses": "Y.csv"}


def read_dataset(
    curve_paths: Sequence[str | Path],
    response_path: str | Path,
    intervals: Optional[Sequence[Tuple[float, float]]] = None,
) -> FunctionalDataset:
    """Read a `FunctionalDataset` from one curves file per predictor plus a responses file."""
    grids, curves = [], []
    for path in curve_paths:
        grid, values = read_curves(path)
        grids.append(grid)
        curves.append(values)
    responses = read_responses(response_path)
    for path, values in zip(curve_paths, curves):
        if values.shape[0] != responses.shape[0]:
            raise DataFormatError(
                f"{values.shape[0]} curves but {responses.shape[0]} response rows", path=str(path)
            )
    bounds = tuple(Interval(float(lo), float(hi)) for lo, hi in intervals) if intervals else ()
    return FunctionalDataset(tuple(grids), tuple(curves), responses, bounds)


__all__ = [
    "read_curves",
    "read_responses",
    "write_curves",
    "write_responses",
    "write_dataset",
    "read_dataset",
]
