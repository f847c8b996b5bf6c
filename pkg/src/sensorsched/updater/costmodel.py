"""How many samples fit into an idle period.

Training time for N samples is a polynomial in N with ascending coefficients. T_min, the time
to train one sample, gates every update.
"""

import logging
import time
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from sensorsched.openworld.evm import EVMModel, evm_update

logger = logging.getLogger(__name__)

_MAX_SAMPLES = 1 << 40


class TrainCostModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    coefficients: list[float] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_nondecreasing(self) -> "TrainCostModel":
        if any(c < 0 for c in self.coefficients):
            raise ValueError("cost coefficients must be non-negative")
        if not any(c > 0 for c in self.coefficients[1:]):
            raise ValueError("cost must grow with the number of samples")
        return self

    @classmethod
    def linear(cls, seconds_per_sample: float, overhead: float = 0.0) -> "TrainCostModel":
        return cls(coefficients=[overhead, seconds_per_sample])

    def seconds_for(self, n_samples: int) -> float:
        return float(np.polynomial.polynomial.polyval(n_samples, self.coefficients))

    @property
    def t_min(self) -> float:
        return self.seconds_for(1)


def compute_samples_to_train(cost: TrainCostModel, t_sp: float) -> int:
    """Largest N whose predicted training time fits in ``t_sp``; 0 below T_min."""
    if t_sp < cost.t_min:
        return 0
    low, high = 1, 2
    while high < _MAX_SAMPLES and cost.seconds_for(high) <= t_sp:
        low, high = high, high * 2
    # seconds_for(low) <= t_sp < seconds_for(high)
    while high - low > 1:
        mid = (low + high) // 2
        if cost.seconds_for(mid) <= t_sp:
            low = mid
        else:
            high = mid
    return low


def calibrate_cost_model(
    model: EVMModel,
    samples: np.ndarray,
    label: int,
    sizes: Sequence[int] = (1, 2, 4, 8),
    degree: int = 1,
) -> TrainCostModel:
    """Fit the cost polynomial to measured ``evm_update`` wall time on growing batches.

    Wall time varies between runs, so experiments use this only when asked to.
    """
    sizes = [n for n in sizes if n <= samples.shape[0]]
    if len(sizes) <= degree:
        raise ValueError(f"need more than {degree} batch sizes to fit, got {sizes}")
    seconds = []
    for n in sizes:
        start = time.perf_counter()
        evm_update(model, samples[:n], label)
        seconds.append(time.perf_counter() - start)
    coefficients = np.polynomial.polynomial.polyfit(sizes, seconds, degree)
    coefficients = np.clip(coefficients, 0.0, None)
    if not np.any(coefficients[1:] > 0):
        coefficients[1] = max(seconds) / max(sizes)
    cost = TrainCostModel(coefficients=coefficients.tolist())
    logger.info(f"Calibrated training cost: {cost.coefficients} (T_min={cost.t_min:.4g}s)")
    return cost
