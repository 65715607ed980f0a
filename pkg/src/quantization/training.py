"""Codebook learning by exponential-moving-average k-means updates.

No gradients are involved: each active layer assigns its residuals to the
nearest codeword and moves codewords towards the running mean of what they
captured. The number of active layers per batch is drawn uniformly from
1..num_layers (quantizer dropout) and only active layers update.
"""
import logging

import numpy as np

from .rvq import nearest_codewords
from .types import Codebook, EmaTrainingConfig, QuantizerError, CODEBOOK_SIZE

logger = logging.getLogger(__name__)


class EmaCodebookTrainer:
    def __init__(self, num_layers: int, config: EmaTrainingConfig, seed: int = 0):
        if num_layers < 1:
            raise QuantizerError(f"num_layers {num_layers} must be >= 1")
        self._num_layers = num_layers
        self._config = config
        self._rng = np.random.default_rng(seed)
        self._codewords: list[np.ndarray] = []
        self._counts: list[np.ndarray] = []
        self._sums: list[np.ndarray] = []

    def fit(self, frames: np.ndarray, epochs: int | None = None) -> list[Codebook]:
        frames = self._check_frames(frames)
        self._initialize(frames)
        epochs = self._config.epochs if epochs is None else epochs
        batch_size = self._config.batch_size

        for epoch in range(epochs):
            order = self._rng.permutation(frames.shape[0])
            for start in range(0, frames.shape[0], batch_size):
                self._train_batch(frames[order[start:start + batch_size]])
            logger.debug(f"EMA epoch {epoch + 1}/{epochs} done")

        return self.codebooks()

    def codebooks(self) -> list[Codebook]:
        return [
            Codebook(codewords=w.copy(), usage_counts=n.copy(), ema_sums=s.copy())
            for w, n, s in zip(self._codewords, self._counts, self._sums)
        ]

    def _check_frames(self, frames: np.ndarray) -> np.ndarray:
        frames = np.asarray(frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[0] == 0:
            raise QuantizerError(f"training frames: expected (N, d), got shape {frames.shape}")
        if not np.all(np.isfinite(frames)):
            raise QuantizerError("training frames: non-finite values")
        if frames.shape[0] < CODEBOOK_SIZE:
            raise QuantizerError(
                f"training frames: need at least {CODEBOOK_SIZE} vectors, got {frames.shape[0]}"
            )
        return frames

    def _initialize(self, frames: np.ndarray) -> None:
        # Each layer starts from distinct residuals of the layers before it.
        self._codewords, self._counts, self._sums = [], [], []
        residual = frames.copy()
        for _ in range(self._num_layers):
            picks = self._rng.choice(residual.shape[0], size=CODEBOOK_SIZE, replace=False)
            codewords = residual[picks].copy()
            self._codewords.append(codewords)
            self._counts.append(np.ones(CODEBOOK_SIZE))
            self._sums.append(codewords.copy())
            chosen = nearest_codewords(residual, Codebook.from_codewords(codewords))
            residual = residual - codewords[chosen]

    def _train_batch(self, batch: np.ndarray) -> None:
        if self._config.quantizer_dropout:
            n_active = int(self._rng.integers(1, self._num_layers + 1))
        else:
            n_active = self._num_layers
        residual = batch.copy()
        for layer in range(n_active):
            codewords = self._codewords[layer]
            chosen = nearest_codewords(residual, Codebook.from_codewords(codewords))
            quantized = codewords[chosen]
            self._update_layer(layer, residual, chosen)
            residual = residual - quantized

    def _update_layer(self, layer: int, residual: np.ndarray, chosen: np.ndarray) -> None:
        decay = self._config.ema_decay
        if decay >= 1.0:
            # decay 1 is the EMA fixed point: statistics and codewords stay put
            return
        eps = self._config.laplace_eps

        batch_counts = np.bincount(chosen, minlength=CODEBOOK_SIZE).astype(np.float64)
        batch_sums = np.zeros_like(self._sums[layer])
        np.add.at(batch_sums, chosen, residual)

        counts = decay * self._counts[layer] + (1.0 - decay) * batch_counts
        sums = decay * self._sums[layer] + (1.0 - decay) * batch_sums
        total = counts.sum()
        smoothed = (counts + eps) / (total + CODEBOOK_SIZE * eps) * total
        codewords = sums / smoothed[:, None]

        dead = np.flatnonzero(smoothed < self._config.dead_code_threshold)
        if dead.size:
            picks = self._rng.choice(
                residual.shape[0], size=dead.size, replace=dead.size > residual.shape[0]
            )
            codewords[dead] = residual[picks]
            counts[dead] = 1.0
            sums[dead] = codewords[dead]
            logger.debug(f"layer {layer}: re-seeded {dead.size} dead codewords")

        self._codewords[layer] = codewords
        self._counts[layer] = counts
        self._sums[layer] = sums


def train_codebooks_ema(
    frames: np.ndarray,
    num_layers: int,
    config: EmaTrainingConfig,
    epochs: int | None = None,
    seed: int = 0,
) -> list[Codebook]:
    return EmaCodebookTrainer(num_layers, config, seed=seed).fit(frames, epochs=epochs)
