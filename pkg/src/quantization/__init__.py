from .types import (
    BITS_PER_INDEX,
    CODEBOOK_SIZE,
    Codebook,
    EmaTrainingConfig,
    ProjectionKind,
    QuantizerError,
    RVQConfig,
)
from .rvq import (
    commitment_loss,
    dequantize,
    mean_quantization_error,
    nearest_codewords,
    quantize,
    quantize_batch,
)
from .training import EmaCodebookTrainer, train_codebooks_ema

__all__ = [
    "BITS_PER_INDEX",
    "CODEBOOK_SIZE",
    "Codebook",
    "EmaTrainingConfig",
    "ProjectionKind",
    "QuantizerError",
    "RVQConfig",
    "commitment_loss",
    "dequantize",
    "mean_quantization_error",
    "nearest_codewords",
    "quantize",
    "quantize_batch",
    "EmaCodebookTrainer",
    "train_codebooks_ema",
]
