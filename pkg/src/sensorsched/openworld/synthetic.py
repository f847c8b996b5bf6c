import numpy as np

from sensorsched import seeding


def blob_centers(seed: int, n_classes: int, dim: int, spread: float = 10.0) -> np.ndarray:
    rng = seeding.rng_for(seed, seeding.OPENWORLD, 0)
    return rng.normal(0.0, spread, size=(n_classes, dim))


def sample_blobs(
    centers: np.ndarray,
    classes: list[int],
    n_per_class: int,
    seed: int,
    stream: int,
    sigma: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Isotropic Gaussian samples around the given centres. ``stream`` selects an independent
    draw so training and test sets never share points."""
    rng = seeding.rng_for(seed, seeding.OPENWORLD, 1, stream)
    features = np.vstack(
        [centers[c] + sigma * rng.standard_normal((n_per_class, centers.shape[1])) for c in classes]
    )
    labels = np.repeat(np.asarray(classes, dtype=np.int64), n_per_class)
    return features, labels
