from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

SUPER_FRAME_FRAMES = 100
MAX_MODE = 6
INDEX_LIMIT = 1024


class BitstreamError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SuperFrame:
    """Up to 100 frames coded with the same number of active RVQ layers."""

    mode: int
    indices: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.mode <= MAX_MODE:
            raise BitstreamError(f"mode {self.mode} outside [1, {MAX_MODE}]")
        indices = np.asarray(self.indices, dtype=np.int64).reshape(-1, self.mode)
        if indices.shape[0] > SUPER_FRAME_FRAMES:
            raise BitstreamError(
                f"super-frame holds {indices.shape[0]} frames, at most {SUPER_FRAME_FRAMES}"
            )
        bad = indices[(indices < 0) | (indices >= INDEX_LIMIT)]
        if bad.size:
            raise BitstreamError(f"index {int(bad[0])} outside [0, {INDEX_LIMIT})")
        indices.setflags(write=False)
        object.__setattr__(self, "indices", indices)

    @property
    def n_frames(self) -> int:
        return int(self.indices.shape[0])

    @property
    def payload_bits(self) -> int:
        return self.indices.size * 10

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperFrame):
            return NotImplemented
        return self.mode == other.mode and np.array_equal(self.indices, other.indices)


@dataclass(frozen=True, eq=False)
class EncodedStream:
    """Indices plus framing. `source_samples` is the input length before
    padding to whole frames; it is known after encoding but is not part of
    the byte format, so unpacked streams carry None."""

    super_frames: tuple[SuperFrame, ...]
    frame_hop: int
    sample_rate: int
    source_samples: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "super_frames", tuple(self.super_frames))
        if not 1 <= self.frame_hop <= 0xFFFF:
            raise BitstreamError(f"frame_hop {self.frame_hop} does not fit 16 bits")
        if not 1 <= self.sample_rate <= 0xFFFFFFFF:
            raise BitstreamError(f"sample_rate {self.sample_rate} does not fit 32 bits")
        for i, sf in enumerate(self.super_frames[:-1]):
            if sf.n_frames != SUPER_FRAME_FRAMES:
                raise BitstreamError(
                    f"super-frame {i} holds {sf.n_frames} frames; only the final "
                    f"super-frame may hold fewer than {SUPER_FRAME_FRAMES}"
                )
        if self.source_samples is not None and not (
            0 <= self.source_samples <= self.padded_samples
        ):
            raise BitstreamError(
                f"source_samples {self.source_samples} outside [0, {self.padded_samples}]"
            )

    @classmethod
    def from_frames(
        cls,
        frames: Sequence[np.ndarray],
        frame_hop: int,
        sample_rate: int,
        source_samples: Optional[int] = None,
    ) -> "EncodedStream":
        super_frames = []
        for start in range(0, len(frames), SUPER_FRAME_FRAMES):
            group = [np.asarray(f, dtype=np.int64) for f in frames[start:start + SUPER_FRAME_FRAMES]]
            arities = {f.shape[0] for f in group}
            if len(arities) != 1:
                raise BitstreamError(
                    f"super-frame {start // SUPER_FRAME_FRAMES} mixes arities {sorted(arities)}"
                )
            super_frames.append(SuperFrame(mode=arities.pop(), indices=np.stack(group)))
        return cls(tuple(super_frames), frame_hop, sample_rate, source_samples)

    @property
    def frame_count(self) -> int:
        return sum(sf.n_frames for sf in self.super_frames)

    @property
    def padded_samples(self) -> int:
        return self.frame_count * self.frame_hop

    @property
    def duration(self) -> Fraction:
        return Fraction(self.frame_count * self.frame_hop, self.sample_rate)

    @property
    def payload_bits(self) -> int:
        return sum(sf.payload_bits for sf in self.super_frames)

    def frames(self) -> list[np.ndarray]:
        return [row for sf in self.super_frames for row in sf.indices]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EncodedStream):
            return NotImplemented
        # source_samples is not serialized
        return (
            self.frame_hop == other.frame_hop
            and self.sample_rate == other.sample_rate
            and self.super_frames == other.super_frames
        )
