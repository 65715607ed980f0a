from dataclasses import dataclass

import numpy as np

CODEC_SAMPLE_RATE = 24000


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono signal. Samples are held as float32 so that the float32 WAV
    encoding round-trips them bit for bit."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float32).reshape(-1)
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples: non-finite value in audio buffer")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate: {self.sample_rate} is not positive")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate
