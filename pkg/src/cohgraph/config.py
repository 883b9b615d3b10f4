"""Run configuration shared by the pipeline and the command line."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from .census import MAX_K, MODES
from .errors import ValidationError

CORRELATION_FEATURES = ("normalized", "count", "presence")


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on; serialized verbatim into every report."""

    corpus_path: Optional[str] = None
    embeddings_path: Optional[str] = None
    features_path: Optional[str] = None
    out_dir: Optional[str] = None
    delta: float = 0.65
    k: int = 4
    w: int = 8
    census_mode: str = "strided"
    hidden_dim: int = 240
    dropout: float = 0.5
    learning_rate: float = 0.01
    epochs: int = 160
    folds: int = 10
    seed: int = 0
    doc_subgraph_edges: bool = True
    subgraph_edges: bool = True
    baseline: bool = False
    workers: int = 1
    correlation_feature: str = "normalized"
    permutations: int = 10000

    def validate(self) -> "RunConfig":
        if not 0.0 < self.delta <= 1.0:
            raise ValidationError(f"delta must lie in (0, 1], got {self.delta}")
        if not 2 <= self.k <= MAX_K:
            raise ValidationError(f"k must lie in 2..{MAX_K}, got {self.k}")
        if self.w < self.k:
            raise ValidationError(f"w={self.w} must be >= k={self.k}")
        if self.census_mode not in MODES:
            raise ValidationError(f"census mode must be one of {MODES}, got {self.census_mode!r}")
        if self.hidden_dim < 1:
            raise ValidationError(f"hidden_dim must be >= 1, got {self.hidden_dim}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValidationError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.folds < 2:
            raise ValidationError(f"folds must be >= 2, got {self.folds}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")
        if self.correlation_feature not in CORRELATION_FEATURES:
            raise ValidationError(
                f"correlation feature must be one of {CORRELATION_FEATURES}, "
                f"got {self.correlation_feature!r}"
            )
        if self.permutations < 1:
            raise ValidationError(f"permutations must be >= 1, got {self.permutations}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)
