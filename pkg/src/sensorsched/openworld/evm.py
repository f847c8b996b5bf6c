import logging
from typing import Iterator, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from sensorsched.models.openworld import (
    UNKNOWN,
    EVMError,
    EVMParams,
    ExtremeVector,
    Prediction,
)
from sensorsched.openworld.weibull import fit_weibull_rows, weibull_psi

logger = logging.getLogger(__name__)


class Standardizer:
    """Z-score transform, frozen once fitted. Constant dimensions keep unit scale."""

    def __init__(self, mean: np.ndarray, scale: np.ndarray):
        self.mean = np.asarray(mean, dtype=np.float64)
        self.scale = np.asarray(scale, dtype=np.float64)
        if self.mean.shape != self.scale.shape or self.mean.ndim != 1:
            raise EVMError("standardizer mean and scale must be vectors of equal length")
        if np.any(self.scale <= 0):
            raise EVMError("standardizer scale must be positive")

    @classmethod
    def fit(cls, features: np.ndarray) -> "Standardizer":
        std = features.std(axis=0)
        return cls(features.mean(axis=0), np.where(std > 0, std, 1.0))

    @classmethod
    def identity(cls, dim: int) -> "Standardizer":
        return cls(np.zeros(dim), np.ones(dim))

    def transform(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.scale


class EVMModel:
    """Extreme vectors of every known class, ordered by class label.

    Models are immutable; ``evm_update`` returns a new one.
    """

    def __init__(
        self,
        params: EVMParams,
        anchors: np.ndarray,
        shapes: np.ndarray,
        scales: np.ndarray,
        labels: np.ndarray,
        standardizer: Standardizer,
    ):
        anchors = np.atleast_2d(np.array(anchors, dtype=np.float64))
        shapes = np.array(shapes, dtype=np.float64)
        scales = np.array(scales, dtype=np.float64)
        labels = np.array(labels, dtype=np.int64)
        n = anchors.shape[0]
        if n == 0:
            raise EVMError("a model needs at least one extreme vector")
        if not (shapes.shape == scales.shape == labels.shape == (n,)):
            raise EVMError("anchors, shapes, scales and labels must have matching lengths")
        if np.any(shapes <= 0) or np.any(scales <= 0):
            raise EVMError("Weibull shape and scale must be positive")
        if anchors.shape[1] != standardizer.mean.shape[0]:
            raise EVMError("standardizer does not match anchor dimensionality")

        order = np.argsort(labels, kind="stable")
        self.params = params
        self.standardizer = standardizer
        self._anchors = anchors[order]
        self._shapes = shapes[order]
        self._scales = scales[order]
        self._labels = labels[order]
        self._anchors_z = standardizer.transform(self._anchors)
        for arr in (self._anchors, self._shapes, self._scales, self._labels, self._anchors_z):
            arr.setflags(write=False)

    @property
    def dim(self) -> int:
        return self._anchors.shape[1]

    @property
    def anchors(self) -> np.ndarray:
        return self._anchors

    @property
    def anchors_z(self) -> np.ndarray:
        return self._anchors_z

    @property
    def shapes(self) -> np.ndarray:
        return self._shapes

    @property
    def scales(self) -> np.ndarray:
        return self._scales

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def classes(self) -> list[int]:
        return sorted(set(self._labels.tolist()))

    def __len__(self) -> int:
        return self._anchors.shape[0]

    def extreme_vectors(self) -> Iterator[ExtremeVector]:
        for anchor, shape, scale, label in zip(
            self._anchors, self._shapes, self._scales, self._labels
        ):
            yield ExtremeVector(
                class_id=int(label), shape=float(shape), scale=float(scale), anchor=anchor.tolist()
            )

    def _check_dim(self, features: np.ndarray) -> np.ndarray:
        features = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if features.shape[1] != self.dim:
            raise EVMError(f"expected {self.dim}-dimensional features, got {features.shape[1]}")
        return features

    def psi(self, features: np.ndarray) -> np.ndarray:
        """Inclusion probability of every query (rows) under every extreme vector (columns)."""
        z = self.standardizer.transform(self._check_dim(features))
        return weibull_psi(cdist(z, self._anchors_z), self._shapes, self._scales)


def _set_cover(points_z: np.ndarray, shapes: np.ndarray, scales: np.ndarray, threshold: float):
    """Greedy cover: indices of the fewest points whose Weibulls cover every point."""
    covers = weibull_psi(cdist(points_z, points_z), shapes[:, None], scales[:, None]) >= threshold
    uncovered = np.ones(points_z.shape[0], dtype=bool)
    chosen: list[int] = []
    while uncovered.any():
        best = int(np.argmax((covers & uncovered).sum(axis=1)))
        chosen.append(best)
        uncovered &= ~covers[best]
    return np.sort(np.array(chosen, dtype=np.int64))


def _fit_extreme_vectors(
    points_z: np.ndarray, others_z: np.ndarray, params: EVMParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if others_z.shape[0] < 1:
        raise EVMError("no points of other classes to form a tail from")
    tail_size = min(params.tail_size, others_z.shape[0])
    distances = cdist(points_z, others_z)
    tails = np.partition(distances, tail_size - 1, axis=1)[:, :tail_size]
    shapes, scales = fit_weibull_rows(tails * params.distance_multiplier)
    keep = _set_cover(points_z, shapes, scales, params.cover_threshold)
    return keep, shapes[keep], scales[keep]


def evm_fit(
    features: np.ndarray, labels: Sequence[int] | np.ndarray, params: EVMParams = EVMParams()
) -> EVMModel:
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.int64)
    if features.shape[0] != labels.shape[0]:
        raise EVMError(f"{features.shape[0]} feature rows but {labels.shape[0]} labels")
    classes = np.unique(labels)
    if classes.size < 2:
        raise EVMError("the EVM needs at least two classes to fit")
    if np.any(classes < 0):
        raise EVMError("class labels must be non-negative")

    if params.standardize:
        standardizer = Standardizer.fit(features)
    else:
        standardizer = Standardizer.identity(features.shape[1])
    z = standardizer.transform(features)

    anchors, shapes, scales, ev_labels = [], [], [], []
    for class_id in classes:
        mask = labels == class_id
        keep, class_shapes, class_scales = _fit_extreme_vectors(z[mask], z[~mask], params)
        anchors.append(features[mask][keep])
        shapes.append(class_shapes)
        scales.append(class_scales)
        ev_labels.append(np.full(keep.size, class_id))
        logger.debug(f"Class {class_id}: {keep.size} of {mask.sum()} points kept as EVs")

    model = EVMModel(
        params,
        np.vstack(anchors),
        np.concatenate(shapes),
        np.concatenate(scales),
        np.concatenate(ev_labels),
        standardizer,
    )
    logger.info(f"Fitted EVM: {len(model)} extreme vectors over {classes.size} classes")
    return model


def evm_predict(model: EVMModel, x: np.ndarray) -> Prediction:
    labels, probabilities = predict_many(model, np.asarray(x)[None, :])
    return Prediction(int(labels[0]), float(probabilities[0]))


def predict_many(model: EVMModel, features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Labels (UNKNOWN where rejected) and max inclusion probabilities for each row."""
    psi = model.psi(features)
    best = psi.argmax(axis=1)
    probabilities = psi[np.arange(psi.shape[0]), best]
    labels = np.where(
        probabilities >= model.params.rejection_threshold, model.labels[best], UNKNOWN
    )
    return labels, probabilities


def evm_update(model: EVMModel, new_features: np.ndarray, new_label: int) -> EVMModel:
    """Add extreme vectors for ``new_label`` fitted against the anchors of every other class.

    Existing extreme vectors are kept as they are; a known label gains extra EVs.
    """
    new_features = np.asarray(new_features, dtype=np.float64)
    if new_features.size == 0:
        raise EVMError("no samples to update the model with")
    new_features = model._check_dim(new_features)
    if new_label < 0:
        raise EVMError(f"class labels must be non-negative, got {new_label}")

    z = model.standardizer.transform(new_features)
    others = model.anchors_z[model.labels != new_label]
    keep, shapes, scales = _fit_extreme_vectors(z, others, model.params)

    updated = EVMModel(
        model.params,
        np.vstack([model.anchors, new_features[keep]]),
        np.concatenate([model.shapes, shapes]),
        np.concatenate([model.scales, scales]),
        np.concatenate([model.labels, np.full(keep.size, new_label)]),
        model.standardizer,
    )
    logger.debug(f"Class {new_label}: +{keep.size} EVs from {new_features.shape[0]} samples")
    return updated
