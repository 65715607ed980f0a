"""Listening-test response tables.

One row per response, comma, tab or semicolon separated, with a header row:

    system, condition, mode, item, rater, rating, correct,
    validation_ok, attention_ok, hearing_ok

``rating`` is the raw scale value (empty for DRT); ``correct`` is the DRT
right/wrong flag (empty otherwise). ``system`` may be omitted for a single
system. Flags accept 1/0, true/false, yes/no, pass/fail.
"""
import io
import logging
from pathlib import Path

import pandas as pd

from .battery import ScoringError

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("condition", "mode", "item", "rater")
SCREENS = ("validation_ok", "attention_ok", "hearing_ok")
DEFAULT_SYSTEM = "system"

_TRUE = {"1", "true", "yes", "pass", "y", "t"}
_FALSE = {"0", "false", "no", "fail", "n", "f"}


def _parse_flag(series: pd.Series, column: str) -> pd.Series:
    text = series.astype(str).str.strip().str.lower()
    unknown = ~text.isin(_TRUE | _FALSE)
    if unknown.any():
        raise ScoringError(f"column {column}: cannot read flag {series[unknown].iloc[0]!r}")
    return text.isin(_TRUE)


def ratings_frame(table: pd.DataFrame) -> pd.DataFrame:
    """Normalize column types of a response table."""
    table = table.rename(columns=lambda c: str(c).strip().lower())
    missing = [c for c in REQUIRED_COLUMNS if c not in table.columns]
    if "rating" not in table.columns and "correct" not in table.columns:
        missing.append("rating|correct")
    if missing:
        raise ScoringError(f"ratings table lacks columns: {', '.join(missing)}")

    frame = pd.DataFrame({
        "system": table["system"].astype(str) if "system" in table.columns else DEFAULT_SYSTEM,
        "condition": table["condition"].astype(str).str.strip(),
        "mode": table["mode"].astype(str).str.strip().str.lower(),
        "item": table["item"].astype(str).str.strip(),
        "rater": table["rater"].astype(str).str.strip(),
    })
    frame["rating"] = pd.to_numeric(table["rating"], errors="coerce") if "rating" in table.columns else float("nan")
    if "correct" in table.columns:
        present = table["correct"].notna()
        frame["correct"] = pd.Series(pd.NA, index=table.index, dtype="boolean")
        frame.loc[present, "correct"] = _parse_flag(table.loc[present, "correct"], "correct").values
    else:
        frame["correct"] = pd.Series(pd.NA, index=table.index, dtype="boolean")
    for screen in SCREENS:
        frame[screen] = _parse_flag(table[screen], screen) if screen in table.columns else True
    return frame


def read_ratings(source: Path | str) -> pd.DataFrame:
    """Read a response table from a path, or from text when given a string
    containing a newline."""
    if isinstance(source, str) and "\n" in source:
        text = source
    else:
        text = Path(source).read_text()
    # separator (comma, tab or semicolon) is sniffed from the header row
    table = pd.read_csv(
        io.StringIO(text), sep=None, engine="python", dtype=str, skipinitialspace=True
    )
    logger.debug(f"Read {len(table)} responses")
    return ratings_frame(table)
