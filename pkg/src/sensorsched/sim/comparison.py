import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import pandas as pd

from sensorsched.models.events import ClassCatalog, EventTrace
from sensorsched.models.simulation import SchedulerDecision, SimMetrics
from sensorsched.sched.policies import SchedulingPolicy
from sensorsched.sim.simulator import Classifier, run_sim

logger = logging.getLogger(__name__)

METRIC_COLUMNS = [
    "policy",
    "transmissions",
    "normalized_ble",
    "cl_misses",
    "missed_events",
    "total_latency",
]


def _simulate(
    trace: EventTrace,
    policy: SchedulingPolicy,
    catalog: ClassCatalog,
    classifier: Classifier | None,
) -> SimMetrics:
    return run_sim(trace, policy, catalog, classifier).metrics


def compare_policies(
    trace: EventTrace,
    policies: Sequence[SchedulingPolicy],
    catalog: ClassCatalog,
    classifier: Classifier | None = None,
    jobs: int = 1,
) -> list[SimMetrics]:
    """Run every policy on the same trace; with ``jobs > 1`` runs go to worker processes."""
    if len(policies) < 2:
        raise ValueError(f"need at least 2 policies to compare, got {len(policies)}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_simulate, trace, policy, catalog, classifier) for policy in policies
            ]
            return [future.result() for future in futures]
    return [_simulate(trace, policy, catalog, classifier) for policy in policies]


def metrics_frame(results: Sequence[SimMetrics]) -> pd.DataFrame:
    return pd.DataFrame([m.summary() for m in results], columns=METRIC_COLUMNS)


def transitions_frame(metrics: SimMetrics) -> pd.DataFrame:
    return pd.DataFrame(
        [t.model_dump() for t in metrics.transitions],
        columns=["boundary_t", "detect_t", "latency", "class_id"],
    )


def decisions_frame(decisions: Sequence[SchedulerDecision]) -> pd.DataFrame:
    return pd.DataFrame(
        [d.model_dump() for d in decisions], columns=["wake_t", "chosen_period", "observed_class"]
    )
