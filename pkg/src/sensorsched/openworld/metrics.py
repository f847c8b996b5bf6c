import numpy as np

from sensorsched.models.openworld import OWConfusion


def b_cubed(predicted: np.ndarray, truth: np.ndarray) -> tuple[float, float, float]:
    """B-cubed (precision, recall, F) of a clustering against true classes.

    Every sample weighs the same; F is the harmonic mean of the averaged precision and recall.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError("predicted and true assignments differ in length")
    if predicted.size == 0:
        return 0.0, 0.0, 0.0

    same_cluster = predicted[:, None] == predicted[None, :]
    same_class = truth[:, None] == truth[None, :]
    both = (same_cluster & same_class).sum(axis=1)
    precision = float(np.mean(both / same_cluster.sum(axis=1)))
    recall = float(np.mean(both / same_class.sum(axis=1)))
    f_score = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f_score


def owm(confusion: OWConfusion) -> float:
    """Open-world metric: accuracy on known-as-known plus B3 on unknown-as-unknown, weighted by
    their counts over all samples."""
    score = (
        confusion.n_kk * confusion.known_accuracy + confusion.n_uu * confusion.b3
    ) / confusion.total
    return float(min(max(score, 0.0), 1.0))
