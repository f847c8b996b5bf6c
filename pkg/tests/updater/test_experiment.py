import pytest

from sensorsched.models.events import ClassCatalog
from sensorsched.models.updates import UpdateStatus
from sensorsched.trace import generator
from sensorsched.updater.costmodel import TrainCostModel, compute_samples_to_train
from sensorsched.updater.experiment import UpdateExperimentConfig, run_update_experiment


@pytest.mark.slow
class TestRunUpdateExperiment:
    """Test cases for run_update_experiment"""

    @pytest.fixture(scope="class")
    def result(self):
        profiles = generator.apply_overrides(generator.kitchen_profiles(), {"class.5.weight": "5"})
        trace = generator.generate_trace(2, 20000, profiles)
        return run_update_experiment(
            2,
            trace,
            ClassCatalog.from_profiles(profiles),
            TrainCostModel.linear(31.0),
            UpdateExperimentConfig(period_overrides={5: 33}),
        )

    def test_queue_drained(self, result):
        assert result.drained
        assert result.log["samples_trained"].sum() == 100
        assert result.log["status"].iloc[-1] == UpdateStatus.SUCCESS

    def test_novel_class_recognised(self, result):
        assert result.recognition_rate >= 0.9
        assert 5 in result.model.classes

    def test_queue_only_shrinks(self, result):
        remaining = result.log["queue_remaining"].tolist()

        assert remaining == sorted(remaining, reverse=True)
        assert remaining[-1] == 0

    def test_each_row_trains_what_its_period_affords(self, result):
        """Test every idle slot trains min(cost-model samples for its period, queue left)"""
        cost = TrainCostModel.linear(31.0)
        remaining = 100

        for row in result.log.itertuples():
            expected = min(compute_samples_to_train(cost, row.t_sp), remaining)
            assert row.samples_trained == expected, row
            remaining -= expected
            assert row.queue_remaining == remaining

    def test_only_long_periods_train(self, result):
        trained = result.log[result.log["samples_trained"] > 0]

        assert not trained.empty
        assert (trained["t_sp"] >= 31).all()

    def test_sim_runs_whole_trace(self, result):
        assert result.sim.metrics.trace_length == 20000


def test_novel_class_outside_catalog(kitchen_trace, kitchen_catalog):
    with pytest.raises(ValueError):
        run_update_experiment(
            1,
            kitchen_trace,
            kitchen_catalog,
            TrainCostModel.linear(31.0),
            UpdateExperimentConfig(novel_class=6),
        )


def test_nothing_to_learn(kitchen_trace, kitchen_catalog):
    """Test an empty queue leaves the log empty and counts as drained"""
    result = run_update_experiment(
        1,
        kitchen_trace,
        kitchen_catalog,
        TrainCostModel.linear(31.0),
        UpdateExperimentConfig(queue_size=0, train_per_class=5, test_samples=5),
    )

    assert result.drained
    assert result.log.empty
