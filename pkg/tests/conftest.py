"""
Common test fixtures and configuration for the sensorsched test suite.
"""

import numpy as np
import pytest

from sensorsched.models.events import ClassCatalog, ClassProfile, EventTrace
from sensorsched.openworld import synthetic
from sensorsched.trace import generator


def trace_of(*runs: tuple[int, int], num_classes: int | None = None) -> EventTrace:
    """Build a trace from (class_id, duration) runs."""
    classes = np.concatenate([np.full(duration, class_id) for class_id, duration in runs])
    return EventTrace(
        classes=classes,
        num_classes=num_classes if num_classes is not None else int(classes.max()) + 1,
    )


def catalog_of(num_classes: int, cl_s: int = 10) -> ClassCatalog:
    return ClassCatalog(names=[f"c{i}" for i in range(num_classes)], cl_s=[cl_s] * num_classes)


@pytest.fixture
def kitchen_profiles() -> list[ClassProfile]:
    return generator.kitchen_profiles()


@pytest.fixture
def kitchen_catalog(kitchen_profiles) -> ClassCatalog:
    return ClassCatalog.from_profiles(kitchen_profiles)


@pytest.fixture
def kitchen_trace(kitchen_profiles) -> EventTrace:
    """The 7000 second kitchen trace for seed 1."""
    return generator.generate_trace(1, 7000, kitchen_profiles)


@pytest.fixture
def three_blobs() -> dict[str, np.ndarray]:
    """Three well separated 2-D classes, a held-out set and a far-away blob."""
    centers = np.array([[0.0, 0.0], [20.0, 0.0], [0.0, 20.0], [60.0, 60.0]])
    train_x, train_y = synthetic.sample_blobs(centers, [0, 1, 2], 50, seed=3, stream=0)
    test_x, test_y = synthetic.sample_blobs(centers, [0, 1, 2], 30, seed=3, stream=1)
    far_x, _ = synthetic.sample_blobs(centers, [3], 30, seed=3, stream=2)
    return {
        "train_x": train_x,
        "train_y": train_y,
        "test_x": test_x,
        "test_y": test_y,
        "far_x": far_x,
    }
