import re
from dataclasses import dataclass

from src.bitstream import MAX_MODE


class ScheduleError(ValueError):
    pass


_ENTRY = re.compile(r"^\s*(\d+)\s*(?:@\s*(\d+)\s*)?$")


@dataclass(frozen=True)
class ModeSchedule:
    """Active-layer count per super-frame, as (start super-frame, mode) pairs."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ScheduleError("schedule is empty")
        if self.entries[0][0] != 0:
            raise ScheduleError(f"first entry starts at super-frame {self.entries[0][0]}, expected 0")
        for (prev, _), (start, _) in zip(self.entries, self.entries[1:]):
            if start <= prev:
                raise ScheduleError(
                    f"super-frame indices must increase strictly: {start} after {prev}"
                )
        for start, mode in self.entries:
            if not 1 <= mode <= MAX_MODE:
                raise ScheduleError(f"mode {mode} at super-frame {start} outside [1, {MAX_MODE}]")

    @classmethod
    def constant(cls, mode: int) -> "ModeSchedule":
        return cls(((0, mode),))

    def mode_for(self, super_frame: int) -> int:
        mode = self.entries[0][1]
        for start, entry_mode in self.entries:
            if start > super_frame:
                break
            mode = entry_mode
        return mode

    def check(self, num_layers: int) -> None:
        for start, mode in self.entries:
            if mode > num_layers:
                raise ScheduleError(
                    f"mode {mode} at super-frame {start} exceeds the model's {num_layers} RVQ layers"
                )

    def __str__(self) -> str:
        return ",".join(f"{mode}@{start}" for start, mode in self.entries)


def parse_schedule(text: str) -> ModeSchedule:
    """Parse "6" or "mode@superframe[,mode@superframe...]" such as "1@0,6@5"."""
    entries = []
    for part in text.split(","):
        match = _ENTRY.match(part)
        if not match:
            raise ScheduleError(f"cannot parse schedule entry {part.strip()!r}")
        mode, start = int(match.group(1)), int(match.group(2) or 0)
        entries.append((start, mode))
    return ModeSchedule(tuple(entries))
