from .coordinator import (
    CodebookTrainer,
    EmbeddingOutcome,
    TrainingError,
    TrainingResult,
    TrainingStats,
)

__all__ = [
    "CodebookTrainer",
    "EmbeddingOutcome",
    "TrainingError",
    "TrainingResult",
    "TrainingStats",
]
