"""Table rendering for study results."""

from __future__ import annotations

import pandas as pd

from src.selection.base import ArgumentError

METRIC_COLUMNS = ["n", "sigma", "basis", "CVP", "FDR", "MSIZE"]


def decimals_for(example: str) -> int:
    """Example 2 tables carry three decimals, the others two."""
    return 3 if str(example).lower() == "ex2" else 2


def format_metrics_table(table: pd.DataFrame, decimals: int = 2) -> pd.DataFrame:
    """
    The n / sigma / basis / CVP / FDR / MSIZE layout with fixed decimals.

    Metric cells become strings so the CSV output does not depend on float
    repr; missing metrics render as ``nan``.
    """
    missing = [c for c in METRIC_COLUMNS if c not in table.columns]
    if missing:
        raise ArgumentError(f"metrics table lacks columns {missing}")
    formatted = table[METRIC_COLUMNS].copy()
    formatted["n"] = formatted["n"].astype(int)
    formatted["sigma"] = formatted["sigma"].map(lambda s: f"{float(s):g}")
    for column in ("CVP", "FDR", "MSIZE"):
        formatted[column] = formatted[column].map(lambda v: f"{float(v):.{decimals}f}")
    return formatted.reset_index(drop=True)


def markdown_summary(table: pd.DataFrame, title: str, decimals: int = 2) -> str:
    """Markdown rendering of a formatted metrics table."""
    formatted = format_metrics_table(table, decimals)
    header = "| " + " | ".join(METRIC_COLUMNS) + " |"
    rule = "|" + "|".join("---" for _ in METRIC_COLUMNS) + "|"
    rows = ["| " + " | ".join(str(v) for v in record) + " |" for record in formatted.itertuples(index=False)]
    lines = [f"## {title}", "", header, rule, *rows]
    if "failures" in table.columns and int(table["failures"].sum()) > 0:
        lines += ["", f"Failed replications: {int(table['failures'].sum())}"]
    return "\n".join(lines) + "\n"


__all__ = ["METRIC_COLUMNS", "decimals_for", "format_metrics_table", "markdown_summary"]
