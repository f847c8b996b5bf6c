"""Idle-time updates of the classifier and the scheduler.

The classifier learns a new class a slice at a time: each idle period trains as many queued
samples as the cost model allows. The scheduler is rebuilt once enough fresh event intervals
have been seen for every class.
"""

import logging
from typing import Mapping, NamedTuple, Sequence

import numpy as np
import pandas as pd

from sensorsched import seeding
from sensorsched.models.events import ClassCatalog, EventTrace
from sensorsched.models.scheduling import (
    QTable,
    RewardWeights,
    ScheduleError,
    TrainConfig,
    TrainMode,
)
from sensorsched.models.simulation import SchedulerDecision
from sensorsched.models.updates import (
    SchedulerType,
    SchedulerUpdate,
    UpdateLogEntry,
    UpdateMode,
    UpdateRequest,
    UpdateStatus,
)
from sensorsched.openworld.evm import EVMModel, evm_update
from sensorsched.sched.clpa import build_clpa_assignment
from sensorsched.sched.qlearning import qlbs_train
from sensorsched.updater.costmodel import TrainCostModel, compute_samples_to_train

logger = logging.getLogger(__name__)

MIN_FRESH_INTERVALS = 5


class ClassifierUpdate(NamedTuple):
    model: EVMModel
    status: UpdateStatus
    samples_trained: int
    queue_remaining: int


def update_classifier(
    model: EVMModel, request: UpdateRequest, t_sp: float, cost: TrainCostModel
) -> ClassifierUpdate:
    """Train the next slice of the queue that fits in ``t_sp`` seconds.

    SUCCESS once the queue is empty, FAIL while samples still wait for a later idle period.
    """
    if request.mode != UpdateMode.CLASSIFIER:
        raise ValueError(f"expected a classifier request, got {request.mode}")
    queue = request.queue
    assert queue is not None and request.label is not None

    if len(queue) == 0:
        return ClassifierUpdate(model, UpdateStatus.SUCCESS, 0, 0)

    n_samples = compute_samples_to_train(cost, t_sp)
    if n_samples == 0:
        return ClassifierUpdate(model, UpdateStatus.FAIL, 0, len(queue))

    batch = queue.pop_many(n_samples)
    model = evm_update(model, batch, request.label)
    status = UpdateStatus.SUCCESS if len(queue) == 0 else UpdateStatus.FAIL
    return ClassifierUpdate(model, status, batch.shape[0], len(queue))


def _has_enough_intervals(
    fresh_intervals: Mapping[int, Sequence[int]], catalog: ClassCatalog, minimum: int
) -> bool:
    short = {
        c: len(fresh_intervals.get(c, []))
        for c in range(catalog.num_classes)
        if len(fresh_intervals.get(c, [])) < minimum
    }
    if short:
        logger.info(f"Not enough fresh intervals for a scheduler update: {short}")
    return not short


def update_scheduler(
    request: UpdateRequest,
    fresh_intervals: Mapping[int, Sequence[int]],
    catalog: ClassCatalog,
    cfg: TrainConfig = TrainConfig(mode=TrainMode.UPDATE),
    history: Mapping[int, Sequence[int]] | None = None,
    fresh_trace: EventTrace | None = None,
    table: QTable | None = None,
    weights: RewardWeights = RewardWeights(),
    rng: np.random.Generator | None = None,
    min_fresh_intervals: int = MIN_FRESH_INTERVALS,
) -> SchedulerUpdate:
    """Recompute CLPA over old and fresh intervals, or continue training a Q-table on the
    fresh trace until it converges."""
    if request.mode != UpdateMode.SCHEDULER:
        raise ValueError(f"expected a scheduler request, got {request.mode}")
    if not _has_enough_intervals(fresh_intervals, catalog, min_fresh_intervals):
        return SchedulerUpdate(status=UpdateStatus.INSUFFICIENT_INTERVALS)

    if request.scheduler_type == SchedulerType.CLPA:
        history = history or {}
        merged = {
            c: [*history.get(c, []), *fresh_intervals.get(c, [])]
            for c in set(history) | set(fresh_intervals)
        }
        assignment = build_clpa_assignment(merged, catalog)
        return SchedulerUpdate(status=UpdateStatus.SUCCESS, assignment=assignment)

    if fresh_trace is None or table is None:
        raise ScheduleError("a Q-learning update needs the fresh trace and the current table")
    result = qlbs_train(
        fresh_trace,
        catalog,
        cfg.model_copy(update={"mode": TrainMode.UPDATE}),
        weights,
        rng if rng is not None else seeding.rng_for(0, seeding.UPDATER),
        old_table=table,
        a_max=table.a_max,
    )
    logger.info(f"Q-table update ran {result.episodes_run} episodes")
    return SchedulerUpdate(
        status=UpdateStatus.SUCCESS, table=result.table, episodes_run=result.episodes_run
    )


class ModelUpdater:
    """Owns the classifier and its queue between wakes; readers only see whole models."""

    def __init__(self, model: EVMModel, request: UpdateRequest, cost: TrainCostModel):
        self.model = model
        self.request = request
        self.cost = cost
        self.log: list[UpdateLogEntry] = []

    @property
    def drained(self) -> bool:
        return self.request.n_pending == 0

    def on_idle(self, decision: SchedulerDecision) -> None:
        """Spend the sleep that follows a wake on the queue. Stops logging once drained."""
        if self.drained:
            return
        update = update_classifier(self.model, self.request, decision.chosen_period, self.cost)
        self.model = update.model
        self.log.append(
            UpdateLogEntry(
                t=decision.wake_t,
                mode=UpdateMode.CLASSIFIER,
                t_sp=decision.chosen_period,
                samples_trained=update.samples_trained,
                queue_remaining=update.queue_remaining,
                status=update.status,
            )
        )
        if update.samples_trained:
            logger.debug(
                f"t={decision.wake_t}: trained {update.samples_trained}, "
                f"{update.queue_remaining} left"
            )

    def log_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [entry.model_dump(mode="json") for entry in self.log],
            columns=["t", "mode", "t_sp", "samples_trained", "queue_remaining", "status"],
        )
