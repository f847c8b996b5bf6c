import logging
from collections import deque
from typing import Iterable, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

logger = logging.getLogger(__name__)

# Label returned for inputs no extreme vector claims.
UNKNOWN = -1


class EVMError(ValueError):
    pass


class ClusteringError(ValueError):
    pass


class EVMParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    tail_size: int = Field(100, ge=1)
    cover_threshold: float = Field(0.7, gt=0.0, le=1.0)
    distance_multiplier: float = Field(0.4, gt=0.0)
    rejection_threshold: float = Field(0.5, gt=0.0, lt=1.0)
    standardize: bool = True


class ExtremeVector(BaseModel):
    """A retained training point with the Weibull that governs its inclusion probability."""

    model_config = ConfigDict(frozen=True)

    class_id: int = Field(ge=0)
    shape: float = Field(gt=0.0)
    scale: float = Field(gt=0.0)
    anchor: list[float]


class Prediction(NamedTuple):
    label: int
    probability: float

    @property
    def is_unknown(self) -> bool:
        return self.label == UNKNOWN


class UnknownQueue:
    """Rejected feature vectors waiting to be clustered or learned. Single writer."""

    def __init__(self, capacity: int, samples: Iterable[np.ndarray] = ()):
        if capacity < 0:
            raise ValueError(f"capacity must be >= 0, got {capacity}")
        self.capacity = capacity
        self._samples: deque[np.ndarray] = deque()
        for sample in samples:
            self.push(sample)

    def push(self, sample: np.ndarray) -> bool:
        if len(self._samples) >= self.capacity:
            logger.warning(f"Unknown queue full ({self.capacity}), dropping sample")
            return False
        self._samples.append(np.asarray(sample, dtype=np.float64))
        return True

    def pop_many(self, n: int) -> np.ndarray:
        """Remove and return up to ``n`` samples in arrival order, stacked as rows."""
        taken = [self._samples.popleft() for _ in range(min(n, len(self._samples)))]
        return np.vstack(taken) if taken else np.empty((0, 0))

    def __len__(self) -> int:
        return len(self._samples)


class OWConfusion(BaseModel):
    """Open-world outcome counts. K/U: known/unknown truth, then known/unknown prediction."""

    n_kk: int = Field(ge=0)
    n_ku: int = Field(ge=0)
    n_uk: int = Field(ge=0)
    n_uu: int = Field(ge=0)
    known_accuracy: float = Field(1.0, ge=0.0, le=1.0)
    b3: float = Field(0.0, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_total(self) -> "OWConfusion":
        if self.total == 0:
            raise ValueError("confusion has no samples")
        return self

    @property
    def total(self) -> int:
        return self.n_kk + self.n_ku + self.n_uk + self.n_uu


class IncrementResult(BaseModel):
    increment: int
    n_kk: int
    n_ku: int
    n_uk: int
    n_uu: int
    known_accuracy: float
    b3_precision: float
    b3_recall: float
    b3: float
    owm: float
    new_classes: int
    extreme_vectors: int
