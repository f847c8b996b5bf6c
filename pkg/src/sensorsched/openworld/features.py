"""FFT and summary-statistic features of a sensor window.

Each channel contributes four values in this order: mean, standard deviation, index of the
dominant non-DC FFT bin, and that bin's amplitude (scaled so a unit sinusoid gives 1.0).
"""

from typing import Sequence

import numpy as np
import pandas as pd

from sensorsched.models.events import SensorWindow

FEATURES_PER_CHANNEL = 4


def extract_features(window: SensorWindow) -> np.ndarray:
    readings = window.channels
    num_samples = readings.shape[1]
    if num_samples < 2:
        raise ValueError(f"window needs at least 2 samples per channel, got {num_samples}")

    mean = readings.mean(axis=1)
    std = readings.std(axis=1)
    spectrum = np.abs(np.fft.rfft(readings, axis=1))[:, 1:]
    peak = spectrum.argmax(axis=1)
    magnitude = spectrum[np.arange(readings.shape[0]), peak] * 2.0 / num_samples

    return np.column_stack([mean, std, peak + 1.0, magnitude]).ravel()


def extract_many(windows: Sequence[SensorWindow]) -> np.ndarray:
    return np.vstack([extract_features(w) for w in windows])


def features_frame(features: np.ndarray, labels: Sequence[int] | None = None) -> pd.DataFrame:
    """Feature CSV layout: ``label,v_1..v_d``; unlabeled rows carry -1."""
    features = np.atleast_2d(features)
    if labels is None:
        labels = [-1] * features.shape[0]
    columns = [f"v_{i + 1}" for i in range(features.shape[1])]
    frame = pd.DataFrame(features, columns=columns)
    frame.insert(0, "label", np.asarray(labels, dtype=np.int64))
    return frame

