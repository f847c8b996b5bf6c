"""Class-level period assignment (CLPA) and the minimum-interval baseline."""

import logging
from typing import Mapping, Sequence

import numpy as np

from sensorsched.models.events import ClassCatalog
from sensorsched.models.scheduling import PeriodAssignment

logger = logging.getLogger(__name__)

# Period used for classes without an assignment, e.g. newly discovered ones.
FALLBACK_PERIOD = 1


def clpa_assign(intervals: Sequence[int], cl_s: int) -> int | None:
    """Largest period T_sp >= 2 such that waking every T_sp seconds from an event's start
    sees its end no later than ``cl_s`` seconds after it happens, for every T_e given.

    Returns None when no such period exists.
    """
    durations = np.asarray(intervals, dtype=np.int64)
    if durations.size == 0:
        return None
    if durations.min() < 1:
        raise ValueError(f"event durations must be >= 1, got {durations.min()}")
    if cl_s < 0:
        raise ValueError(f"CL_s must be >= 0, got {cl_s}")

    for period in range(int(durations.min()), 1, -1):
        # ceil(T_e / T_sp) * T_sp - T_e
        if np.all((-durations) % period <= cl_s):
            return period
    return None


def min_interval_assign(intervals_by_class: Mapping[int, Sequence[int]]) -> PeriodAssignment:
    """Per class, the shortest event duration seen. Classes without intervals are left out."""
    return PeriodAssignment(
        periods={
            class_id: int(min(durations))
            for class_id, durations in intervals_by_class.items()
            if len(durations) > 0
        }
    )


def build_clpa_assignment(
    intervals_by_class: Mapping[int, Sequence[int]], catalog: ClassCatalog
) -> PeriodAssignment:
    """CLPA per class. An infeasible class is retried with CL_s = 1, which always admits
    T_sp = 2 when every T_e >= 2; a class that still has no period is left unassigned."""
    periods: dict[int, int] = {}
    for class_id, durations in sorted(intervals_by_class.items()):
        cl_s = catalog.cl_of(class_id)
        period = clpa_assign(durations, cl_s)
        if period is None and cl_s < 1:
            logger.warning(f"CLPA infeasible for class {class_id} at CL_s={cl_s}, retrying at 1")
            period = clpa_assign(durations, 1)
        if period is None:
            logger.warning(
                f"No CLPA period for class {class_id}; it falls back to {FALLBACK_PERIOD}s"
            )
            continue
        periods[class_id] = period
    logger.info(f"CLPA periods: {periods}")
    return PeriodAssignment(periods=periods)


def clpa_decide(assignment: PeriodAssignment, class_id: int) -> int:
    period = assignment.period_for(class_id)
    return FALLBACK_PERIOD if period is None else period
