"""Replay a scheduling policy against a ground-truth trace.

The sensor wakes at t=0, classifies, asks the policy for a period and sleeps. Classification is
instantaneous at the wake second. A boundary b is detected by the first wake at or after b if
that wake still falls inside the new event; otherwise the event is missed.
"""

import abc
import logging
from typing import Callable

import numpy as np

from sensorsched.models.events import ClassCatalog, EventTrace
from sensorsched.models.openworld import UNKNOWN
from sensorsched.models.simulation import (
    SchedulerDecision,
    SimMetrics,
    SimResult,
    TransitionRecord,
)
from sensorsched.openworld.evm import EVMModel, evm_predict
from sensorsched.openworld.features import extract_features
from sensorsched.sched.policies import SchedulingPolicy
from sensorsched.trace.generator import intervals_of
from sensorsched.trace.windows import DEFAULT_WINDOW, WindowParams, synthesize_window

logger = logging.getLogger(__name__)

# Called once per wake, after the decision; may only use the idle time that follows it.
IdleHook = Callable[[SchedulerDecision], None]


class Classifier(abc.ABC):
    @abc.abstractmethod
    def classify(self, trace: EventTrace, t: int) -> int:
        pass


class OracleClassifier(Classifier):
    """Reports the ground-truth class."""

    def classify(self, trace: EventTrace, t: int) -> int:
        return trace.class_at(t)


class OpenWorldClassifier(Classifier):
    """Synthesizes the window the sensor would read and runs it through the EVM.

    Rejected windows are reported as the unknown class.
    """

    def __init__(
        self,
        model: EVMModel,
        seed: int,
        window_params: WindowParams = DEFAULT_WINDOW,
        label_map: dict[int, int] | None = None,
    ):
        self.model = model
        self.seed = seed
        self.window_params = window_params
        self.label_map = label_map or {}

    def classify(self, trace: EventTrace, t: int) -> int:
        window = synthesize_window(trace, t, self.seed, self.window_params)
        prediction = evm_predict(self.model, extract_features(window))
        if prediction.is_unknown:
            return UNKNOWN
        return self.label_map.get(prediction.label, prediction.label)


def run_sim(
    trace: EventTrace,
    policy: SchedulingPolicy,
    catalog: ClassCatalog,
    classifier: Classifier | None = None,
    idle_hook: IdleHook | None = None,
) -> SimResult:
    classifier = classifier or OracleClassifier()
    policy.reset()

    decisions: list[SchedulerDecision] = []
    t = 0
    while t < trace.length:
        observed = classifier.classify(trace, t)
        period = policy.decide(observed)
        decision = SchedulerDecision(wake_t=t, chosen_period=period, observed_class=observed)
        decisions.append(decision)
        if idle_hook is not None:
            idle_hook(decision)
        t += period

    wakes = np.array([d.wake_t for d in decisions], dtype=np.int64)
    intervals = intervals_of(trace)
    transitions: list[TransitionRecord] = []
    cl_misses = 0
    missed = 0
    for interval in intervals[1:]:
        i = int(np.searchsorted(wakes, interval.start, side="left"))
        if i < wakes.size and wakes[i] < interval.end:
            detect = int(wakes[i])
            latency = detect - interval.start
            transitions.append(
                TransitionRecord(
                    boundary_t=interval.start,
                    detect_t=detect,
                    latency=latency,
                    class_id=interval.class_id,
                )
            )
            if latency > catalog.cl_of(interval.class_id):
                cl_misses += 1
        else:
            missed += 1

    metrics = SimMetrics(
        policy=policy.name,
        trace_length=trace.length,
        transmissions=len(decisions),
        cl_misses=cl_misses,
        missed_events=missed,
        num_intervals=len(intervals),
        transitions=transitions,
    )
    logger.info(
        f"{policy.name}: {metrics.transmissions} wakes (BLE {metrics.normalized_ble:.3f}), "
        f"{cl_misses} CL misses, {missed} missed events, latency {metrics.total_latency}s"
    )
    return SimResult(metrics=metrics, decisions=decisions)
