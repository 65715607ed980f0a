"""Rater screening, per-condition aggregation and the weighted final score."""
import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping

import pandas as pd

from .battery import TEST_RANGES, BatteryConfig, Condition, Mode, ScoringError, TestType
from .ratings import SCREENS

logger = logging.getLogger(__name__)


@dataclass
class ScreeningResult:
    records: pd.DataFrame
    raters_failed: dict[str, int] = field(default_factory=dict)
    records_dropped: int = 0


def filter_raters(records: pd.DataFrame) -> ScreeningResult:
    """Drop every response of any rater who failed any screen."""
    failed: set[str] = set()
    per_screen = {}
    for screen in SCREENS:
        raters = set(records.loc[~records[screen].astype(bool), "rater"])
        per_screen[screen] = len(raters)
        failed |= raters
    kept = records[~records["rater"].isin(failed)]
    dropped = len(records) - len(kept)
    if failed:
        logger.debug(f"Screened out {len(failed)} raters ({dropped} responses)")
    return ScreeningResult(kept, per_screen, dropped)


def _condition_rows(records: pd.DataFrame, condition: str | Condition) -> pd.DataFrame:
    condition_id = condition.id if isinstance(condition, Condition) else condition
    rows = records[records["condition"] == condition_id]
    if rows.empty:
        raise ScoringError(f"condition {condition_id}: no surviving responses")
    return rows


def aggregate_raw(records: pd.DataFrame, condition: str | Condition) -> float:
    """Mean of per-item means."""
    rows = _condition_rows(records, condition)
    item_means = rows.groupby("item")["rating"].mean()
    empty = item_means[item_means.isna()]
    if not empty.empty:
        raise ScoringError(f"item {empty.index[0]}: no ratings")
    return float(item_means.mean())


def drt_raw(records: pd.DataFrame, condition: str | Condition) -> float:
    """Per item 100 * (right - wrong) / (right + wrong), averaged over items."""
    rows = _condition_rows(records, condition)
    answered = rows[rows["correct"].notna()]
    if answered.empty:
        raise ScoringError(f"condition {rows['condition'].iloc[0]}: no DRT responses")
    unanswered = set(rows["item"]) - set(answered["item"])
    if unanswered:
        raise ScoringError(f"item {sorted(unanswered)[0]}: no DRT responses")
    correct = answered["correct"].astype(bool)
    per_item = correct.groupby(answered["item"]).agg(["sum", "count"])
    right = per_item["sum"].astype(float)
    wrong = per_item["count"] - right
    return float((100.0 * (right - wrong) / (right + wrong)).mean())


def _linear(raw: float, low: float, high: float) -> float:
    return (raw - low) / (high - low) * 100.0


NORMALIZATIONS: dict[str, Callable[[float, float, float], float]] = {
    "linear": _linear,
}


def normalize(
    raw: float,
    test_type: TestType | str,
    value_range: tuple[float, float] | None = None,
    method: str = "linear",
) -> float:
    """Map a raw score from its test's range onto [0, 100]."""
    test_type = TestType(test_type)
    low, high = value_range or TEST_RANGES[test_type]
    if not low <= raw <= high:
        raise ScoringError(f"{test_type.value} raw score {raw} outside [{low}, {high}]")
    mapping = NORMALIZATIONS.get(method)
    if mapping is None:
        raise ScoringError(f"unknown normalization {method!r}; choose from {sorted(NORMALIZATIONS)}")
    return mapping(raw, low, high)


def final_score(normalized: Mapping[tuple[str, Mode], float], battery: BatteryConfig) -> float:
    """Sum of weight x normalized / 100 over every weighted (condition, mode)."""
    missing = []
    total = 0.0
    for condition in battery.conditions:
        for mode in Mode:
            weight = condition.weight(mode)
            if weight == 0:
                continue
            value = normalized.get((condition.id, mode))
            if value is None:
                missing.append(f"{condition.id}/{mode.value}")
                continue
            total += weight * value / 100.0
    if missing:
        raise ScoringError(f"missing normalized scores for: {', '.join(missing)}")
    return total


@dataclass(frozen=True)
class ConditionScore:
    condition: str
    mode: Mode
    test: TestType
    raw: float
    normalized: float
    weight: float
    items: int
    responses: int

    @property
    def contribution(self) -> float:
        return self.weight * self.normalized / 100.0


@dataclass
class ScoreReport:
    system: str
    track: int
    conditions: list[ConditionScore]
    final: float
    raters_failed: dict[str, int] = field(default_factory=dict)
    records_dropped: int = 0


def _check_ranges(records: pd.DataFrame, battery: BatteryConfig) -> None:
    for condition in battery.conditions:
        if condition.test is TestType.DRT:
            continue
        ratings = records.loc[records["condition"] == condition.id, "rating"].dropna()
        low, high = condition.range
        bad = ratings[(ratings < low) | (ratings > high)]
        if not bad.empty:
            raise ScoringError(
                f"condition {condition.id}: rating {bad.iloc[0]} outside [{low:g}, {high:g}]"
            )
    modes = set(records["mode"]) - {m.value for m in Mode}
    if modes:
        raise ScoringError(f"unknown mode {sorted(modes)[0]!r}; expected ulb or lb")


def score_system(
    records: pd.DataFrame, battery: BatteryConfig, method: str = "linear"
) -> ScoreReport:
    """Screen raters, then score every weighted (condition, mode) of one system."""
    _check_ranges(records, battery)
    screening = filter_raters(records)
    kept = screening.records
    scores = []
    for condition in battery.conditions:
        for mode in condition.modes:
            rows = kept[kept["mode"] == mode.value]
            rows = rows[rows["condition"] == condition.id]
            if rows.empty:
                raise ScoringError(f"condition {condition.id}/{mode.value}: no surviving responses")
            if condition.test is TestType.DRT:
                raw = drt_raw(rows, condition)
            else:
                raw = aggregate_raw(rows, condition)
            scores.append(ConditionScore(
                condition=condition.id,
                mode=mode,
                test=condition.test,
                raw=raw,
                normalized=normalize(raw, condition.test, condition.range, method),
                weight=condition.weight(mode),
                items=int(rows["item"].nunique()),
                responses=len(rows),
            ))
    final = final_score({(s.condition, s.mode): s.normalized for s in scores}, battery)
    system = str(records["system"].iloc[0]) if len(records) else ""
    return ScoreReport(
        system=system,
        track=battery.track,
        conditions=scores,
        final=final,
        raters_failed=screening.raters_failed,
        records_dropped=screening.records_dropped,
    )


def rank_systems(
    records: pd.DataFrame, battery: BatteryConfig, method: str = "linear"
) -> list[ScoreReport]:
    """Score each system independently, best final score first."""
    reports = [
        score_system(group, battery, method)
        for _, group in records.groupby("system", sort=True)
    ]
    return sorted(reports, key=lambda r: r.final, reverse=True)


def coverage(records: pd.DataFrame, battery: BatteryConfig) -> pd.DataFrame:
    """Responses per item against the number each test collects."""
    counts = (
        records.groupby(["system", "condition", "mode", "item"]).size()
        .groupby(["system", "condition", "mode"])
        .agg(["count", "min", "mean"])
        .rename(columns={"count": "items", "min": "min_responses", "mean": "mean_responses"})
        .reset_index()
    )
    expected = {c.id: c.expected_responses for c in battery.conditions}
    counts["expected_responses"] = counts["condition"].map(expected).astype("Int64")
    counts["complete"] = counts["min_responses"] >= counts["expected_responses"]
    return counts
