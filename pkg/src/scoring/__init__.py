from .battery import (
    EXPECTED_RESPONSES,
    TEST_RANGES,
    BatteryConfig,
    BatteryFile,
    BatteryRegistry,
    Condition,
    Mode,
    ScoringError,
    TestType,
)
from .ratings import SCREENS, ratings_frame, read_ratings
from .aggregate import (
    NORMALIZATIONS,
    ConditionScore,
    ScoreReport,
    ScreeningResult,
    aggregate_raw,
    coverage,
    drt_raw,
    filter_raters,
    final_score,
    normalize,
    rank_systems,
    score_system,
)
from .report import render_score_table, score_document

__all__ = [
    "EXPECTED_RESPONSES",
    "TEST_RANGES",
    "BatteryConfig",
    "BatteryFile",
    "BatteryRegistry",
    "Condition",
    "Mode",
    "ScoringError",
    "TestType",
    "SCREENS",
    "ratings_frame",
    "read_ratings",
    "NORMALIZATIONS",
    "ConditionScore",
    "ScoreReport",
    "ScreeningResult",
    "aggregate_raw",
    "coverage",
    "drt_raw",
    "filter_raters",
    "final_score",
    "normalize",
    "rank_systems",
    "score_system",
    "render_score_table",
    "score_document",
]
