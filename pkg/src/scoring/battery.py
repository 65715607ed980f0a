from enum import Enum
from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ScoringError(ValueError):
    pass


class TestType(str, Enum):
    MUSHRA1S = "MUSHRA1S"
    DCR = "DCR"
    ACR = "ACR"
    DRT = "DRT"


class Mode(str, Enum):
    ULB = "ulb"
    LB = "lb"


TEST_RANGES: dict[TestType, tuple[float, float]] = {
    TestType.MUSHRA1S: (0.0, 100.0),
    TestType.DCR: (1.0, 5.0),
    TestType.ACR: (1.0, 5.0),
    TestType.DRT: (-100.0, 100.0),
}

# responses collected per test item
EXPECTED_RESPONSES: dict[TestType, int] = {
    TestType.MUSHRA1S: 8,
    TestType.DCR: 8,
    TestType.ACR: 8,
    TestType.DRT: 15,
}


class Condition(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str
    name: str = ""
    files: int = Field(default=0, ge=0)
    test: TestType
    range: tuple[float, float]
    weight_ulb: Optional[float] = Field(default=None, ge=0)
    weight_lb: Optional[float] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check(self) -> "Condition":
        if self.range[0] >= self.range[1]:
            raise ValueError(f"condition {self.id}: empty range {list(self.range)}")
        return self

    def weight(self, mode: Mode) -> float:
        """Percent weight in a mode; a mode the condition is not tested in weighs 0."""
        value = self.weight_ulb if mode is Mode.ULB else self.weight_lb
        return value or 0.0

    @property
    def modes(self) -> list[Mode]:
        return [m for m in Mode if self.weight(m) > 0]

    @property
    def expected_responses(self) -> int:
        return EXPECTED_RESPONSES[self.test]


class BatteryConfig(BaseModel):
    """Evaluation battery of one track."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    track: int
    conditions: tuple[Condition, ...]

    @model_validator(mode="after")
    def _check(self) -> "BatteryConfig":
        ids = [c.id for c in self.conditions]
        if len(set(ids)) != len(ids):
            raise ValueError(f"track {self.track}: duplicate condition ids")
        total = sum(c.weight(m) for c in self.conditions for m in Mode)
        if abs(total - 100.0) > 1e-9:
            raise ValueError(f"track {self.track}: weights sum to {total}, expected 100")
        return self

    def condition(self, condition_id: str) -> Condition:
        for c in self.conditions:
            if c.id == condition_id:
                return c
        raise ScoringError(f"track {self.track} has no condition {condition_id!r}")

    def mode_weight(self, mode: Mode) -> float:
        return sum(c.weight(mode) for c in self.conditions)


class BatteryFile(BaseModel):
    tracks: list[BatteryConfig]


class BatteryRegistry:
    def __init__(self, config_path: Path):
        self._config_path = config_path
        self._tracks: dict[int, BatteryConfig] = {}
        self._load()

    def _load(self) -> None:
        with open(self._config_path) as f:
            data = yaml.safe_load(f)
        config = BatteryFile.model_validate(data)
        self._tracks = {t.track: t for t in config.tracks}

    def get_all_batteries(self) -> list[BatteryConfig]:
        return list(self._tracks.values())

    def get_battery(self, track: int) -> Optional[BatteryConfig]:
        return self._tracks.get(track)
