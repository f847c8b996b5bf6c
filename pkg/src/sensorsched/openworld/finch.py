"""First-neighbour (FINCH) clustering of rejected samples."""

import logging

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist

from sensorsched.models.openworld import ClusteringError

logger = logging.getLogger(__name__)

# Label given to samples in clusters dropped by select_partition.
UNCLUSTERED = -1


def _first_neighbor_labels(points: np.ndarray) -> tuple[int, np.ndarray]:
    """Components of the graph linking every point to its nearest neighbour.

    Treating the links as undirected joins mutual neighbours and points sharing a neighbour.
    """
    n = points.shape[0]
    if n == 1:
        return 1, np.zeros(1, dtype=np.int64)
    distances = cdist(points, points)
    np.fill_diagonal(distances, np.inf)
    nearest = distances.argmin(axis=1)
    graph = csr_matrix((np.ones(n), (np.arange(n), nearest)), shape=(n, n))
    count, labels = connected_components(graph, directed=True, connection="weak")
    return count, labels.astype(np.int64)


def _cluster_means(points: np.ndarray, labels: np.ndarray, count: int) -> np.ndarray:
    sums = np.zeros((count, points.shape[1]))
    np.add.at(sums, labels, points)
    return sums / np.bincount(labels, minlength=count)[:, None]


def finch_cluster(features: np.ndarray) -> list[np.ndarray]:
    """Partition hierarchy, finest first; each entry labels every input point.

    Levels recurse on cluster means and stop when a level merges nothing. A level that would
    put everything in one cluster ends the hierarchy without being kept, unless it is the first.
    """
    points = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if points.shape[0] < 2:
        raise ClusteringError(f"FINCH needs at least 2 samples, got {points.shape[0]}")

    count, labels = _first_neighbor_labels(points)
    hierarchy = [labels]
    logger.debug(f"FINCH level 0: {count} clusters")

    while count > 1:
        means = _cluster_means(points, hierarchy[-1], count)
        merged_count, merged = _first_neighbor_labels(means)
        if merged_count == count or merged_count == 1:
            break
        hierarchy.append(merged[hierarchy[-1]])
        count = merged_count
        logger.debug(f"FINCH level {len(hierarchy) - 1}: {count} clusters")

    return hierarchy


def select_partition(hierarchy: list[np.ndarray], min_samples: int = 10) -> np.ndarray:
    """Pick the partition with the fewest clusters and drop clusters under ``min_samples``.

    Surviving clusters are relabelled 0..m-1 by first appearance; the rest become UNCLUSTERED.
    """
    if not hierarchy:
        raise ClusteringError("empty partition hierarchy")
    coarsest = min(hierarchy, key=lambda labels: np.unique(labels).size)
    result = np.full(coarsest.shape, UNCLUSTERED, dtype=np.int64)
    next_label = 0
    for cluster in dict.fromkeys(coarsest.tolist()):
        mask = coarsest == cluster
        if mask.sum() >= min_samples:
            result[mask] = next_label
            next_label += 1
    logger.debug(f"Selected partition keeps {next_label} clusters of size >= {min_samples}")
    return result
