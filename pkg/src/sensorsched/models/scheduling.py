import enum
import re
from typing import Annotated, NamedTuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

# Largest sensing period a Q-learning scheduler may choose, in seconds.
A_MAX = 100


class ScheduleError(ValueError):
    pass


class PeriodAssignment(BaseModel):
    """Fixed sensing period per class id, as produced by CLPA or the minimum-interval rule."""

    model_config = ConfigDict(frozen=True)

    periods: dict[int, Annotated[int, Field(ge=1)]]

    def period_for(self, class_id: int) -> int | None:
        return self.periods.get(class_id)

    def scaled(self, factor: int) -> "PeriodAssignment":
        if factor < 1:
            raise ScheduleError(f"scale factor must be >= 1, got {factor}")
        return PeriodAssignment(periods={c: p * factor for c, p in self.periods.items()})

    def with_overrides(self, overrides: dict[int, int]) -> "PeriodAssignment":
        return PeriodAssignment(periods={**self.periods, **overrides})

    def to_frame(self) -> pd.DataFrame:
        rows = sorted(self.periods.items())
        return pd.DataFrame(rows, columns=["class_id", "T_sp"])

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "PeriodAssignment":
        return cls(
            periods={int(c): int(p) for c, p in zip(frame["class_id"], frame["T_sp"])}
        )


class QState(NamedTuple):
    class_id: int
    prev_period: int


class RewardWeights(BaseModel):
    """Reward magnitudes. Cr1 judges the slack after a boundary, Cr2 rewards non-decreasing
    periods. Penalties are applied as negative rewards."""

    model_config = ConfigDict(frozen=True)

    w_p1: float = Field(10.0, gt=0.0)
    w_n1: float = Field(50.0, gt=0.0)
    w_p2: float = Field(1.0, gt=0.0)
    w_n2: float = Field(5.0, gt=0.0)

    @classmethod
    def from_criteria(cls, cr1: str, cr2: str) -> "RewardWeights":
        """Build from ``R/P`` strings, e.g. ``from_criteria("10/50", "1/5")``."""
        w_p1, w_n1 = _parse_reward_pair(cr1)
        w_p2, w_n2 = _parse_reward_pair(cr2)
        return cls(w_p1=w_p1, w_n1=w_n1, w_p2=w_p2, w_n2=w_n2)


def _parse_reward_pair(text: str) -> tuple[float, float]:
    match = re.fullmatch(r"\s*([0-9.]+)\s*/\s*([0-9.]+)\s*", text)
    if not match:
        raise ScheduleError(f"expected reward/penalty as R/P, got {text!r}")
    return float(match.group(1)), float(match.group(2))


class TrainMode(enum.StrEnum):
    FULL = "full"
    UPDATE = "update"


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_episodes: int = Field(20000, ge=0)
    epsilon: float = Field(0.1, ge=0.0, le=1.0)
    alpha: float = Field(0.1, gt=0.0, le=1.0)
    gamma: float = Field(0.6, ge=0.0, lt=1.0)
    theta: float = Field(0.01, ge=0.0)
    n_success: int = Field(5, ge=1)
    mode: TrainMode = TrainMode.FULL


class QTable:
    """Dense action weights. Row ``class_id * a_max + (prev_period - 1)`` holds the weights of
    actions 1..a_max for that state; column ``a - 1`` is action ``a``."""

    def __init__(self, num_classes: int, a_max: int = A_MAX, weights: np.ndarray | None = None):
        if num_classes < 1:
            raise ScheduleError(f"num_classes must be >= 1, got {num_classes}")
        if a_max < 1:
            raise ScheduleError(f"a_max must be >= 1, got {a_max}")
        self._num_classes = num_classes
        self._a_max = a_max
        shape = (num_classes * a_max, a_max)
        if weights is None:
            self._weights = np.zeros(shape, dtype=np.float64)
        else:
            weights = np.array(weights, dtype=np.float64)
            if weights.shape != shape:
                raise ScheduleError(f"expected weights of shape {shape}, got {weights.shape}")
            if not np.all(np.isfinite(weights)):
                raise ScheduleError("Q-table weights must be finite")
            self._weights = weights

    @property
    def num_classes(self) -> int:
        return self._num_classes

    @property
    def a_max(self) -> int:
        return self._a_max

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def state_index(self, state: QState) -> int:
        if not 0 <= state.class_id < self._num_classes:
            raise ScheduleError(f"class {state.class_id} outside table of {self._num_classes}")
        if not 1 <= state.prev_period <= self._a_max:
            raise ScheduleError(f"previous period {state.prev_period} outside [1, {self._a_max}]")
        return state.class_id * self._a_max + state.prev_period - 1

    def row(self, state: QState) -> np.ndarray:
        return self._weights[self.state_index(state)]

    def copy(self) -> "QTable":
        return QTable(self._num_classes, self._a_max, self._weights.copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QTable):
            return NotImplemented
        return (
            self._num_classes == other._num_classes
            and self._a_max == other._a_max
            and np.array_equal(self._weights, other._weights)
        )

    def __repr__(self) -> str:
        return f"QTable(num_classes={self._num_classes}, a_max={self._a_max})"
