import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from src.audio import WavFormatError, read_wav, validate_codec_input
from src.codec import Model, embed
from src.quantization import (
    CODEBOOK_SIZE,
    EmaTrainingConfig,
    mean_quantization_error,
    train_codebooks_ema,
)

logger = logging.getLogger(__name__)


class TrainingError(ValueError):
    pass


@dataclass
class TrainingStats:
    files_found: int = 0
    files_used: int = 0
    files_skipped: int = 0
    frames_collected: int = 0
    skipped: list[str] = field(default_factory=list)


@dataclass
class EmbeddingOutcome:
    success: bool
    frames: Optional[np.ndarray] = None
    error_message: Optional[str] = None


@dataclass
class TrainingResult:
    model: Model
    stats: TrainingStats
    error_by_mode: dict[int, float]


class CodebookTrainer:
    """Walks a WAV corpus, collects projected encoder embeddings and fits the
    model's codebooks to them."""

    def __init__(self, model: Model, config: EmaTrainingConfig, seed: int = 0):
        self._model = model
        self._config = config
        self._seed = seed

    def embed_file(self, path: Path) -> EmbeddingOutcome:
        try:
            audio = read_wav(path.read_bytes())
        except (OSError, WavFormatError) as e:
            return EmbeddingOutcome(success=False, error_message=str(e))
        check = validate_codec_input(audio)
        if not check.ok:
            return EmbeddingOutcome(success=False, error_message="; ".join(check.violations))

        latent = embed(self._model, audio.samples)
        return EmbeddingOutcome(success=True, frames=self._model.project_in(latent).T)

    def collect(self, corpus_dir: Path) -> tuple[np.ndarray, TrainingStats]:
        if not corpus_dir.is_dir():
            raise TrainingError(f"corpus directory {corpus_dir} does not exist")
        stats = TrainingStats()
        batches = []
        for path in sorted(corpus_dir.rglob("*.wav")):
            stats.files_found += 1
            outcome = self.embed_file(path)
            if not outcome.success:
                logger.warning(f"Skipping {path}: {outcome.error_message}")
                stats.files_skipped += 1
                stats.skipped.append(str(path))
                continue
            batches.append(outcome.frames)
            stats.files_used += 1
            stats.frames_collected += outcome.frames.shape[0]
            logger.debug(f"Embedded {path}: {outcome.frames.shape[0]} frames")

        if stats.files_found == 0:
            raise TrainingError(f"no WAV files in {corpus_dir}")
        if stats.frames_collected < CODEBOOK_SIZE:
            raise TrainingError(
                f"corpus yields {stats.frames_collected} frames, at least "
                f"{CODEBOOK_SIZE} needed to initialize codebooks"
            )
        return np.concatenate(batches, axis=0), stats

    def train(self, corpus_dir: Path, epochs: Optional[int] = None) -> TrainingResult:
        frames, stats = self.collect(corpus_dir)
        codebooks = train_codebooks_ema(
            frames,
            self._model.num_layers,
            self._config,
            epochs=epochs,
            seed=self._seed,
        )
        error_by_mode = {
            n: mean_quantization_error(frames, codebooks, n)
            for n in range(1, len(codebooks) + 1)
        }
        return TrainingResult(self._model.with_codebooks(codebooks), stats, error_by_mode)
