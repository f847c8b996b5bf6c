"""Incremental open-world run: classify a stream, reject, cluster the rejects, learn new classes.

Increment 0 streams only the initially known classes. Each later increment adds a group of
incoming classes on top of everything streamed before. After scoring an increment, every FINCH
cluster of rejected samples that survives the size filter becomes a new class through
``evm_update``; its pseudo-label maps to the majority true class of its members.
"""

import logging

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from sensorsched.models.openworld import UNKNOWN, EVMParams, IncrementResult, OWConfusion
from sensorsched.openworld import finch, metrics, synthetic
from sensorsched.openworld.evm import EVMModel, evm_fit, evm_update, predict_many

logger = logging.getLogger(__name__)


class OpenWorldConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_known: int = Field(9, ge=2)
    n_increments: int = Field(3, ge=0)
    per_increment: int = Field(3, ge=1)
    dim: int = Field(16, ge=1)
    train_per_class: int = Field(60, ge=2)
    test_per_class: int = Field(40, ge=1)
    min_samples: int = Field(10, ge=1)
    spread: float = Field(10.0, gt=0.0)
    sigma: float = Field(1.0, gt=0.0)

    @property
    def total_classes(self) -> int:
        return self.n_known + self.n_increments * self.per_increment


def _singletons_for_unclustered(assignment: np.ndarray) -> np.ndarray:
    """Give every unclustered sample its own cluster id so B3 scores it as a singleton."""
    result = assignment.copy()
    loose = np.flatnonzero(result == finch.UNCLUSTERED)
    result[loose] = assignment.max(initial=0) + 1 + np.arange(loose.size)
    return result


class OpenWorldLearner:
    """Holds the current model and the mapping from model labels to true classes."""

    def __init__(self, model: EVMModel, known_classes: list[int], first_pseudo_label: int):
        self.model = model
        self.label_map: dict[int, int] = {c: c for c in known_classes}
        self.learned: set[int] = set(known_classes)
        self._next_label = first_pseudo_label

    def mapped_predictions(self, features: np.ndarray) -> np.ndarray:
        labels, _ = predict_many(self.model, features)
        return np.array(
            [UNKNOWN if label == UNKNOWN else self.label_map[int(label)] for label in labels],
            dtype=np.int64,
        )

    def learn_clusters(
        self, features: np.ndarray, truth: np.ndarray, assignment: np.ndarray
    ) -> int:
        added = 0
        for cluster in sorted(set(assignment.tolist()) - {finch.UNCLUSTERED}):
            members = assignment == cluster
            majority = int(np.bincount(truth[members]).argmax())
            label = self._next_label
            self._next_label += 1
            self.model = evm_update(self.model, features[members], label)
            self.label_map[label] = majority
            self.learned.add(majority)
            added += 1
            logger.debug(f"Learned pseudo-class {label} ({members.sum()} samples) -> {majority}")
        return added


def score_increment(
    increment: int,
    learner: OpenWorldLearner,
    features: np.ndarray,
    truth: np.ndarray,
    min_samples: int,
) -> tuple[IncrementResult, np.ndarray, np.ndarray]:
    """Score one stream; returns the result, the rejection mask and the clustering of the
    rejected samples."""
    predicted = learner.mapped_predictions(features)
    known = np.isin(truth, sorted(learner.learned))
    rejected = predicted == UNKNOWN

    kk = known & ~rejected
    uu = ~known & rejected
    known_accuracy = float(np.mean(predicted[kk] == truth[kk])) if kk.any() else 0.0

    rejected_features = features[rejected]
    if rejected_features.shape[0] >= 2:
        assignment = finch.select_partition(
            finch.finch_cluster(rejected_features), min_samples=min_samples
        )
    else:
        assignment = np.full(rejected_features.shape[0], finch.UNCLUSTERED, dtype=np.int64)

    unknown_among_rejected = ~known[rejected]
    precision, recall, b3 = metrics.b_cubed(
        _singletons_for_unclustered(assignment)[unknown_among_rejected],
        truth[rejected][unknown_among_rejected],
    )

    confusion = OWConfusion(
        n_kk=int(kk.sum()),
        n_ku=int((known & rejected).sum()),
        n_uk=int((~known & ~rejected).sum()),
        n_uu=int(uu.sum()),
        known_accuracy=known_accuracy,
        b3=b3,
    )
    result = IncrementResult(
        increment=increment,
        n_kk=confusion.n_kk,
        n_ku=confusion.n_ku,
        n_uk=confusion.n_uk,
        n_uu=confusion.n_uu,
        known_accuracy=known_accuracy,
        b3_precision=precision,
        b3_recall=recall,
        b3=b3,
        owm=metrics.owm(confusion),
        new_classes=0,
        extreme_vectors=len(learner.model),
    )
    return result, rejected, assignment


def known_training_set(seed: int, cfg: OpenWorldConfig) -> tuple[np.ndarray, np.ndarray]:
    """Features and labels the initial model is fit on, one blob per known class."""
    centers = synthetic.blob_centers(seed, cfg.total_classes, cfg.dim, cfg.spread)
    return synthetic.sample_blobs(
        centers, list(range(cfg.n_known)), cfg.train_per_class, seed, stream=0, sigma=cfg.sigma
    )


def run_open_world(
    seed: int,
    cfg: OpenWorldConfig = OpenWorldConfig(),
    params: EVMParams = EVMParams(),
) -> list[IncrementResult]:
    centers = synthetic.blob_centers(seed, cfg.total_classes, cfg.dim, cfg.spread)
    known_classes = list(range(cfg.n_known))
    train_x, train_y = known_training_set(seed, cfg)
    learner = OpenWorldLearner(evm_fit(train_x, train_y, params), known_classes, cfg.total_classes)

    results: list[IncrementResult] = []
    for increment in range(cfg.n_increments + 1):
        present = list(range(cfg.n_known + increment * cfg.per_increment))
        test_x, test_y = synthetic.sample_blobs(
            centers, present, cfg.test_per_class, seed, stream=increment + 1, sigma=cfg.sigma
        )
        result, rejected, assignment = score_increment(
            increment, learner, test_x, test_y, cfg.min_samples
        )
        added = learner.learn_clusters(test_x[rejected], test_y[rejected], assignment)
        result = result.model_copy(update={"new_classes": added})
        results.append(result)
        logger.info(
            f"Increment {increment}: OWM={result.owm:.3f} acc={result.known_accuracy:.3f} "
            f"B3={result.b3:.3f} KU={result.n_ku} UU={result.n_uu} new={added}"
        )
    return results


def results_frame(results: list[IncrementResult]) -> pd.DataFrame:
    return pd.DataFrame([r.model_dump() for r in results])
