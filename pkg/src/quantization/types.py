from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

BITS_PER_INDEX = 10
CODEBOOK_SIZE = 1 << BITS_PER_INDEX


class QuantizerError(ValueError):
    pass


class ProjectionKind(str, Enum):
    IDENTITY = "identity"
    LEARNED = "learned"


class RVQConfig(BaseModel):
    """Quantizer shape as declared in a model descriptor."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    num_layers: int = Field(default=6, ge=1)
    dim: int = Field(ge=1)
    model_dim: int = Field(ge=1)
    bits_per_index: int = BITS_PER_INDEX
    projection: ProjectionKind = ProjectionKind.LEARNED

    @model_validator(mode="after")
    def _check(self) -> "RVQConfig":
        if self.bits_per_index != BITS_PER_INDEX:
            raise ValueError(
                f"bits_per_index {self.bits_per_index}, codebooks hold "
                f"{CODEBOOK_SIZE} codewords ({BITS_PER_INDEX} bits)"
            )
        if self.projection is ProjectionKind.IDENTITY and self.dim != self.model_dim:
            raise ValueError(
                f"identity projection needs dim == model_dim, got {self.dim} and {self.model_dim}"
            )
        return self

    @property
    def codebook_size(self) -> int:
        return CODEBOOK_SIZE


class EmaTrainingConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    ema_decay: float = Field(default=0.99, gt=0.0, le=1.0)
    laplace_eps: float = Field(default=1e-5, gt=0.0)
    dead_code_threshold: float = Field(default=1e-3, ge=0.0)
    batch_size: int = Field(default=2048, ge=1)
    epochs: int = Field(default=20, ge=1)
    quantizer_dropout: bool = True


@dataclass(frozen=True, eq=False)
class Codebook:
    codewords: np.ndarray
    usage_counts: np.ndarray
    ema_sums: np.ndarray

    def __post_init__(self) -> None:
        codewords = np.asarray(self.codewords, dtype=np.float64)
        if codewords.ndim != 2 or codewords.shape[0] != CODEBOOK_SIZE:
            raise QuantizerError(
                f"codebook: expected ({CODEBOOK_SIZE}, d) codewords, got {codewords.shape}"
            )
        if not np.all(np.isfinite(codewords)):
            raise QuantizerError("codebook: non-finite codewords")
        if np.any(np.asarray(self.usage_counts) < 0):
            raise QuantizerError("codebook: negative usage count")
        object.__setattr__(self, "codewords", codewords)
        object.__setattr__(self, "_sq_norms", np.sum(codewords ** 2, axis=1))

    @classmethod
    def from_codewords(cls, codewords: np.ndarray) -> "Codebook":
        codewords = np.asarray(codewords, dtype=np.float64)
        return cls(
            codewords=codewords,
            usage_counts=np.ones(codewords.shape[0]),
            ema_sums=codewords.copy(),
        )

    @property
    def dim(self) -> int:
        return int(self.codewords.shape[1])

    @property
    def sq_norms(self) -> np.ndarray:
        return self._sq_norms
