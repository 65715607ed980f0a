from typing import Sequence

import numpy as np

from .types import Codebook, QuantizerError, CODEBOOK_SIZE


def nearest_codewords(residuals: np.ndarray, codebook: Codebook) -> np.ndarray:
    """Euclidean argmin per row; ties go to the lowest index.

    Ties are judged on the expanded distance below, so two codewords that are
    equidistant in exact arithmetic may still differ by rounding and resolve
    to the higher index.

    Uses ||r||^2 - 2 r.c + ||c||^2 with ||c||^2 precomputed, the same d MACs
    per codeword the compliance analyzer charges.
    """
    distances = (
        np.sum(residuals ** 2, axis=1, keepdims=True)
        - 2.0 * residuals @ codebook.codewords.T
        + codebook.sq_norms
    )
    return np.argmin(distances, axis=1)


def _check_active(n_active: int, codebooks: Sequence[Codebook]) -> None:
    if not 1 <= n_active <= len(codebooks):
        raise QuantizerError(f"n_active {n_active} outside [1, {len(codebooks)}]")


def quantize(
    x, codebooks: Sequence[Codebook], n_active: int
) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    _check_active(n_active, codebooks)
    if x.ndim != 1 or x.shape[0] != codebooks[0].dim:
        raise QuantizerError(f"input of shape {x.shape}, expected ({codebooks[0].dim},)")
    indices, residual = quantize_batch(x[None, :], codebooks, n_active)
    return indices[0], residual[0]


def quantize_batch(
    frames: np.ndarray, codebooks: Sequence[Codebook], n_active: int
) -> tuple[np.ndarray, np.ndarray]:
    """Greedy residual search over rows of ``frames``; returns (N, n_active)
    indices and the (N, d) final residuals."""
    _check_active(n_active, codebooks)
    residual = np.array(frames, dtype=np.float64)
    if residual.ndim != 2 or residual.shape[1] != codebooks[0].dim:
        raise QuantizerError(
            f"frames of shape {residual.shape}, expected (N, {codebooks[0].dim})"
        )
    indices = np.zeros((residual.shape[0], n_active), dtype=np.int64)
    for layer, codebook in enumerate(codebooks[:n_active]):
        chosen = nearest_codewords(residual, codebook)
        indices[:, layer] = chosen
        residual -= codebook.codewords[chosen]
    return indices, residual


def dequantize(indices, codebooks: Sequence[Codebook]) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    if indices.shape[0] > len(codebooks):
        raise QuantizerError(f"{indices.shape[0]} indices for {len(codebooks)} layers")
    out = np.zeros(codebooks[0].dim)
    for layer, index in enumerate(indices):
        if not 0 <= index < CODEBOOK_SIZE:
            raise QuantizerError(f"layer {layer}: index {index} outside [0, {CODEBOOK_SIZE})")
        out = out + codebooks[layer].codewords[index]
    return out


def commitment_loss(x, q) -> float:
    """Mean squared distance between an embedding and its quantized value."""
    x = np.asarray(x, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if x.shape != q.shape:
        raise QuantizerError(f"dimension mismatch: {x.shape} vs {q.shape}")
    return float(np.mean((x - q) ** 2))


def mean_quantization_error(
    frames: np.ndarray, codebooks: Sequence[Codebook], n_active: int
) -> float:
    _, residual = quantize_batch(frames, codebooks, n_active)
    return float(np.mean(np.sum(residual ** 2, axis=1)))
