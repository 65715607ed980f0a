from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, Field


class Budget(BaseModel):
    track: Literal[1, 2]
    receive_side_mflops: float = Field(gt=0)
    total_mflops: float = Field(gt=0)
    latency_ms: float = Field(gt=0)
    ulb_bitrate_bps: int = Field(gt=0)
    lb_bitrate_bps: int = Field(gt=0)


class BudgetsConfig(BaseModel):
    budgets: list[Budget]


class BudgetRegistry:
    def __init__(self, config_path: Path):
        self._config_path = config_path
        self._budgets: dict[int, Budget] = {}
        self._load()

    def _load(self) -> None:
        with open(self._config_path) as f:
            data = yaml.safe_load(f)
        config = BudgetsConfig.model_validate(data)
        self._budgets = {b.track: b for b in config.budgets}

    def get_all_budgets(self) -> list[Budget]:
        return list(self._budgets.values())

    def get_budget(self, track: int) -> Optional[Budget]:
        return self._budgets.get(track)
