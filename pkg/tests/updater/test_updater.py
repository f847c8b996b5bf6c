import numpy as np
import pytest

from sensorsched import seeding
from sensorsched.models.openworld import UnknownQueue
from sensorsched.models.scheduling import RewardWeights, ScheduleError, TrainConfig, TrainMode
from sensorsched.models.simulation import SchedulerDecision
from sensorsched.models.updates import (
    SchedulerType,
    UpdateMode,
    UpdateRequest,
    UpdateStatus,
)
from sensorsched.openworld import synthetic
from sensorsched.openworld.evm import evm_fit, evm_update, predict_many
from sensorsched.sched.clpa import build_clpa_assignment
from sensorsched.sched.qlearning import qlbs_train
from sensorsched.trace.generator import intervals_by_class
from sensorsched.updater.costmodel import TrainCostModel
from sensorsched.updater.updater import ModelUpdater, update_classifier, update_scheduler
from tests.conftest import catalog_of, trace_of

NOVEL = 9


def novel_samples(n: int) -> np.ndarray:
    features, _ = synthetic.sample_blobs(np.array([[60.0, 60.0]]), [0], n, seed=4, stream=0)
    return features


def classifier_request(n: int) -> UpdateRequest:
    return UpdateRequest(
        mode=UpdateMode.CLASSIFIER, queue=UnknownQueue(n, list(novel_samples(n))), label=NOVEL
    )


class TestUpdateClassifier:
    """Test cases for update_classifier"""

    @pytest.fixture(autouse=True)
    def setup(self, three_blobs):
        """Set up test fixtures"""
        self.blobs = three_blobs
        self.model = evm_fit(three_blobs["train_x"], three_blobs["train_y"])
        self.cost = TrainCostModel.linear(31.0)

    def test_one_sample_per_call(self):
        """Test a queue of 100 drains over 100 calls, failing until the last"""
        request = classifier_request(100)
        model = self.model
        statuses = []

        for _ in range(100):
            update = update_classifier(model, request, 33, self.cost)
            model = update.model
            statuses.append(update.status)
            assert update.samples_trained == 1

        assert statuses[:-1] == [UpdateStatus.FAIL] * 99
        assert statuses[-1] == UpdateStatus.SUCCESS
        assert request.n_pending == 0
        assert np.sum(model.labels == NOVEL) == 100

    def test_period_below_t_min(self):
        """Test a too-short idle period leaves the queue and model alone"""
        request = classifier_request(10)

        update = update_classifier(self.model, request, 30, self.cost)

        assert update.status == UpdateStatus.FAIL
        assert update.samples_trained == 0
        assert update.queue_remaining == 10
        assert update.model is self.model

    def test_long_period_drains_at_once(self):
        request = classifier_request(10)

        update = update_classifier(self.model, request, 31 * 10, self.cost)

        assert update.status == UpdateStatus.SUCCESS
        assert update.samples_trained == 10
        assert update.queue_remaining == 0

    def test_empty_queue(self):
        request = UpdateRequest(mode=UpdateMode.CLASSIFIER, queue=UnknownQueue(5), label=NOVEL)

        update = update_classifier(self.model, request, 33, self.cost)

        assert update.status == UpdateStatus.SUCCESS
        assert update.model is self.model

    def test_wrong_mode(self):
        request = UpdateRequest(mode=UpdateMode.SCHEDULER, scheduler_type=SchedulerType.CLPA)

        with pytest.raises(ValueError):
            update_classifier(self.model, request, 33, self.cost)

    def test_incremental_matches_batch(self):
        """Test learning a class one sample at a time predicts like learning it at once"""
        samples = novel_samples(100)
        batch = evm_update(self.model, samples, NOVEL)
        request = classifier_request(100)
        incremental = self.model
        while request.n_pending:
            incremental = update_classifier(incremental, request, 33, self.cost).model

        queries = np.vstack([self.blobs["test_x"], novel_samples(100)])
        batch_labels, _ = predict_many(batch, queries)
        incremental_labels, _ = predict_many(incremental, queries)

        assert np.array_equal(batch_labels, incremental_labels)
        assert np.mean(incremental_labels[-100:] == NOVEL) >= 0.9


class TestUpdateRequest:
    """Test cases for UpdateRequest validation"""

    def test_classifier_needs_queue(self):
        with pytest.raises(ValueError):
            UpdateRequest(mode=UpdateMode.CLASSIFIER, label=NOVEL)

    def test_scheduler_needs_type(self):
        with pytest.raises(ValueError):
            UpdateRequest(mode=UpdateMode.SCHEDULER)


class TestUpdateScheduler:
    """Test cases for update_scheduler"""

    def setup_method(self):
        """Set up test fixtures"""
        self.catalog = catalog_of(2)
        self.request = UpdateRequest(mode=UpdateMode.SCHEDULER, scheduler_type=SchedulerType.CLPA)
        self.fresh = {0: [10, 12, 15, 10, 20], 1: [30] * 5}

    def test_insufficient_intervals(self):
        """Test too few fresh intervals for a class postpones the update"""
        update = update_scheduler(self.request, {0: [10] * 5, 1: [30] * 4}, self.catalog)

        assert update.status == UpdateStatus.INSUFFICIENT_INTERVALS
        assert update.assignment is None

    def test_clpa_over_fresh_intervals(self):
        update = update_scheduler(self.request, self.fresh, self.catalog)

        assert update.status == UpdateStatus.SUCCESS
        assert update.assignment.periods == {0: 10, 1: 30}

    def test_clpa_includes_history(self):
        """Test old intervals still constrain the recomputed periods"""
        update = update_scheduler(self.request, self.fresh, self.catalog, history={0: [8]})

        merged = {0: [8, *self.fresh[0]], 1: self.fresh[1]}
        assert update.assignment.periods == build_clpa_assignment(merged, self.catalog).periods
        assert update.assignment.periods[0] == 8

    def test_wrong_mode(self):
        request = classifier_request(1)

        with pytest.raises(ValueError):
            update_scheduler(request, self.fresh, self.catalog)


class TestUpdateSchedulerQLearning:
    """Test cases for the Q-learning branch of update_scheduler"""

    def setup_method(self):
        """Set up test fixtures"""
        self.catalog = catalog_of(2)
        self.trace = trace_of(*[(i % 2, 12 + 3 * (i % 3)) for i in range(12)])
        self.fresh = intervals_by_class(self.trace)
        self.request = UpdateRequest(mode=UpdateMode.SCHEDULER, scheduler_type=SchedulerType.QLBS)
        self.table = qlbs_train(
            self.trace,
            self.catalog,
            TrainConfig(n_episodes=20),
            RewardWeights(),
            seeding.rng_for(1, seeding.QLEARNING),
        ).table

    def _update(self, theta: float):
        return update_scheduler(
            self.request,
            self.fresh,
            self.catalog,
            cfg=TrainConfig(n_episodes=200, theta=theta, mode=TrainMode.UPDATE),
            fresh_trace=self.trace,
            table=self.table,
            rng=seeding.rng_for(1, seeding.UPDATER),
        )

    def test_larger_theta_stops_no_later(self):
        """Test a looser convergence threshold never trains longer"""
        runs = [self._update(theta).episodes_run for theta in (0.0, 0.01, 0.1, 1.0)]

        assert runs == sorted(runs, reverse=True)
        assert runs[-1] == TrainConfig().n_success

    def test_old_table_untouched(self):
        before = self.table.copy()

        update = self._update(0.1)

        assert update.status == UpdateStatus.SUCCESS
        assert update.table is not self.table
        assert self.table == before

    def test_needs_trace_and_table(self):
        with pytest.raises(ScheduleError):
            update_scheduler(self.request, self.fresh, self.catalog)


class TestModelUpdater:
    """Test cases for ModelUpdater"""

    def test_stops_after_draining(self, three_blobs):
        """Test the updater logs one entry per idle period until the queue is empty"""
        model = evm_fit(three_blobs["train_x"], three_blobs["train_y"])
        updater = ModelUpdater(model, classifier_request(20), TrainCostModel.linear(31.0))

        for i in range(30):
            updater.on_idle(SchedulerDecision(wake_t=33 * i, chosen_period=33, observed_class=0))

        assert updater.drained
        assert len(updater.log) == 20
        assert updater.log[-1].status == UpdateStatus.SUCCESS
        assert np.sum(updater.model.labels == NOVEL) == 20

    def test_short_periods_logged_as_failures(self, three_blobs):
        model = evm_fit(three_blobs["train_x"], three_blobs["train_y"])
        updater = ModelUpdater(model, classifier_request(5), TrainCostModel.linear(31.0))

        updater.on_idle(SchedulerDecision(wake_t=0, chosen_period=10, observed_class=0))

        frame = updater.log_frame()
        assert frame.to_dict("records") == [
            {
                "t": 0,
                "mode": "classifier",
                "t_sp": 10,
                "samples_trained": 0,
                "queue_remaining": 5,
                "status": "fail",
            }
        ]
        assert updater.model is model
