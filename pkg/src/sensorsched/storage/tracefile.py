import logging
import pathlib

import numpy as np
import pandas as pd

from sensorsched.models.events import EventTrace, TraceError

logger = logging.getLogger(__name__)

COLUMNS = ["t", "class_id"]


def save_trace(path: pathlib.Path | str, trace: EventTrace) -> None:
    frame = pd.DataFrame({"t": np.arange(trace.length), "class_id": trace.classes})
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    logger.info(f"Saved {trace.length}s trace to {path}")


def load_trace(path: pathlib.Path | str, num_classes: int | None = None) -> EventTrace:
    """Load a ``t,class_id`` trace. Imported traces from other datasets use the same format.

    ``num_classes`` defaults to one more than the largest class id in the file.
    """
    frame = pd.read_csv(path)
    if list(frame.columns) != COLUMNS:
        raise TraceError(f"{path}: expected header {','.join(COLUMNS)}, got {list(frame.columns)}")
    if frame.empty:
        raise TraceError(f"{path}: trace is empty")
    if not np.array_equal(frame["t"].to_numpy(), np.arange(len(frame))):
        raise TraceError(f"{path}: timestamps must be consecutive seconds starting at 0")
    classes = frame["class_id"].to_numpy(dtype=np.int64)
    if num_classes is None:
        num_classes = int(classes.max()) + 1
    logger.info(f"Loaded {len(frame)}s trace from {path}")
    return EventTrace(classes=classes, num_classes=num_classes)
