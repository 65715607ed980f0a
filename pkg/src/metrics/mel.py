import librosa
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.audio import AudioBuffer


class MetricsError(ValueError):
    pass


class MelLossConfig(BaseModel):
    """Scales of the multi-scale mel distance; hop is a quarter of each FFT."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    fft_sizes: tuple[int, ...] = (512, 1024, 2048)
    mel_bins: tuple[int, ...] = (40, 80, 160)
    fmin: float = Field(default=0.0, ge=0.0)
    fmax: float = Field(default=12000.0, gt=0.0)
    log_floor: float = Field(default=1e-5, gt=0.0)

    @model_validator(mode="after")
    def _check(self) -> "MelLossConfig":
        if len(self.fft_sizes) != len(self.mel_bins):
            raise ValueError(
                f"{len(self.fft_sizes)} fft_sizes but {len(self.mel_bins)} mel_bins"
            )
        if not self.fft_sizes:
            raise ValueError("at least one scale required")
        if self.fmin >= self.fmax:
            raise ValueError(f"fmin {self.fmin} must be below fmax {self.fmax}")
        return self


def _check_pair(ref: AudioBuffer, test: AudioBuffer) -> None:
    if ref.sample_rate != test.sample_rate:
        raise MetricsError(f"sample rates differ: {ref.sample_rate} vs {test.sample_rate}")
    if len(ref) != len(test):
        raise MetricsError(f"lengths differ: {len(ref)} vs {len(test)}")


def log_mel(samples: np.ndarray, sample_rate: int, n_fft: int, n_mels: int, cfg: MelLossConfig) -> np.ndarray:
    """Natural-log mel magnitudes, (n_mels, frames). Signals shorter than one
    FFT are zero-padded on the right."""
    x = np.asarray(samples, dtype=np.float64)
    if x.shape[0] < n_fft:
        x = np.pad(x, (0, n_fft - x.shape[0]))
    magnitude = np.abs(
        librosa.stft(x, n_fft=n_fft, hop_length=n_fft // 4, window="hann", center=False)
    )
    fb = librosa.filters.mel(
        sr=sample_rate, n_fft=n_fft, n_mels=n_mels, fmin=cfg.fmin, fmax=cfg.fmax
    )
    return np.log(np.maximum(fb @ magnitude, cfg.log_floor))


def multiscale_mel_loss(
    ref: AudioBuffer, test: AudioBuffer, cfg: MelLossConfig | None = None
) -> float:
    cfg = cfg or MelLossConfig()
    _check_pair(ref, test)
    if cfg.fmax > ref.sample_rate / 2:
        raise MetricsError(f"fmax {cfg.fmax} above Nyquist {ref.sample_rate / 2}")
    losses = []
    for n_fft, n_mels in zip(cfg.fft_sizes, cfg.mel_bins):
        a = log_mel(ref.samples, ref.sample_rate, n_fft, n_mels, cfg)
        b = log_mel(test.samples, test.sample_rate, n_fft, n_mels, cfg)
        losses.append(float(np.mean(np.abs(a - b))))
    return float(np.mean(losses))
