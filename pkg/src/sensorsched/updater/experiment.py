"""Updater case study: a class the classifier has never seen shows up and is learned from a
queue of its windows during the idle periods of a class-level schedule."""

import logging

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from sensorsched.models.events import ClassCatalog, EventTrace
from sensorsched.models.openworld import EVMParams, UnknownQueue
from sensorsched.models.simulation import SimResult
from sensorsched.models.updates import UpdateMode, UpdateRequest
from sensorsched.openworld.evm import EVMModel, evm_fit, predict_many
from sensorsched.openworld.features import extract_many
from sensorsched.sched.clpa import build_clpa_assignment
from sensorsched.sched.policies import ClassPeriodPolicy
from sensorsched.sim.simulator import run_sim
from sensorsched.trace.generator import intervals_by_class
from sensorsched.trace.windows import DEFAULT_WINDOW, WindowParams, synthesize_class_window
from sensorsched.updater.costmodel import TrainCostModel, calibrate_cost_model
from sensorsched.updater.updater import ModelUpdater

logger = logging.getLogger(__name__)

# Window timestamps used only to seed noise, kept apart so the sets never share a window.
_TRAIN_T0 = 0
_QUEUE_T0 = 100_000
_TEST_T0 = 200_000


class UpdateExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    novel_class: int = Field(5, ge=0)
    queue_size: int = Field(100, ge=0)
    train_per_class: int = Field(30, ge=1)
    test_samples: int = Field(50, ge=1)
    period_overrides: dict[int, int] = {}
    calibrate: bool = False


class UpdateExperimentResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    model: EVMModel
    sim: SimResult
    log: pd.DataFrame
    drained: bool
    recognition_rate: float


def _class_features(class_id: int, count: int, t0: int, seed: int, params: WindowParams):
    windows = [synthesize_class_window(class_id, t0 + i, seed, params) for i in range(count)]
    return extract_many(windows)


def run_update_experiment(
    seed: int,
    trace: EventTrace,
    catalog: ClassCatalog,
    cost: TrainCostModel,
    cfg: UpdateExperimentConfig = UpdateExperimentConfig(),
    evm_params: EVMParams = EVMParams(),
    window_params: WindowParams = DEFAULT_WINDOW,
) -> UpdateExperimentResult:
    if not 0 <= cfg.novel_class < catalog.num_classes:
        raise ValueError(f"novel class {cfg.novel_class} not in the catalog")
    known = [c for c in range(catalog.num_classes) if c != cfg.novel_class]

    features = [
        _class_features(c, cfg.train_per_class, _TRAIN_T0, seed, window_params) for c in known
    ]
    labels = np.repeat(known, cfg.train_per_class)
    model = evm_fit(np.vstack(features), labels, evm_params)

    novel = (
        _class_features(cfg.novel_class, cfg.queue_size, _QUEUE_T0, seed, window_params)
        if cfg.queue_size
        else np.empty((0, model.dim))
    )
    queue = UnknownQueue(cfg.queue_size, list(novel))
    request = UpdateRequest(mode=UpdateMode.CLASSIFIER, queue=queue, label=cfg.novel_class)

    if cfg.calibrate and cfg.queue_size > 0:
        cost = calibrate_cost_model(model, novel, cfg.novel_class)

    assignment = build_clpa_assignment(intervals_by_class(trace), catalog).with_overrides(
        cfg.period_overrides
    )
    logger.info(f"Schedule for update experiment: {assignment.periods}")

    updater = ModelUpdater(model, request, cost)
    sim = run_sim(trace, ClassPeriodPolicy(assignment, "clpa"), catalog, idle_hook=updater.on_idle)

    test = _class_features(cfg.novel_class, cfg.test_samples, _TEST_T0, seed, window_params)
    predicted, _ = predict_many(updater.model, test)
    recognition_rate = float(np.mean(predicted == cfg.novel_class))
    logger.info(
        f"Queue {'drained' if updater.drained else 'not drained'} "
        f"({request.n_pending} left); class {cfg.novel_class} recognised at {recognition_rate:.2f}"
    )
    return UpdateExperimentResult(
        model=updater.model,
        sim=sim,
        log=updater.log_frame(),
        drained=updater.drained,
        recognition_rate=recognition_rate,
    )
