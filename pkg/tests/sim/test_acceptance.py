"""End-to-end scheduler behaviour on the seeded 7000s kitchen trace."""

import pytest

from sensorsched import seeding
from sensorsched.models.events import ClassCatalog, EventInterval, EventTrace
from sensorsched.models.scheduling import RewardWeights, TrainConfig, TrainMode
from sensorsched.models.simulation import SimResult
from sensorsched.sched.clpa import build_clpa_assignment, min_interval_assign
from sensorsched.sched.policies import ClassPeriodPolicy, FixedPeriodPolicy, QLearningPolicy
from sensorsched.sched.qlearning import TrainResult, qlbs_train
from sensorsched.sim.simulator import run_sim
from sensorsched.trace import generator
from tests.conftest import catalog_of, trace_of

EPISODES = 2000


def train(
    trace: EventTrace,
    catalog: ClassCatalog,
    seed: int,
    weights: RewardWeights = RewardWeights(),
    cfg: TrainConfig = TrainConfig(n_episodes=EPISODES),
    old: TrainResult | None = None,
) -> TrainResult:
    return qlbs_train(
        trace,
        catalog,
        cfg,
        weights,
        seeding.rng_for(seed, seeding.QLEARNING),
        old_table=old.table if old is not None else None,
    )


def kitchen(seed: int) -> tuple[EventTrace, ClassCatalog]:
    profiles = generator.kitchen_profiles()
    return generator.generate_trace(seed, 7000, profiles), ClassCatalog.from_profiles(profiles)


def missed_events(trace: EventTrace, result: SimResult) -> list[EventInterval]:
    detected = {record.boundary_t for record in result.metrics.transitions}
    return [i for i in generator.intervals_of(trace)[1:] if i.start not in detected]


@pytest.mark.slow
class TestKitchenComparison:
    """The four policies on the default kitchen trace, seed 1"""

    @pytest.fixture(scope="class")
    def setup(self):
        trace, catalog = kitchen(1)
        trained = train(trace, catalog, 1)
        intervals = generator.intervals_by_class(trace)
        policies = [
            FixedPeriodPolicy(1),
            ClassPeriodPolicy(build_clpa_assignment(intervals, catalog), "clpa"),
            QLearningPolicy(trained.table),
            ClassPeriodPolicy(min_interval_assign(intervals), "min"),
        ]
        results = {p.name: run_sim(trace, p, catalog) for p in policies}
        return trace, trained, results

    def test_training_reduces_penalties(self, setup):
        """Test the share of penalised steps falls over training"""
        _, trained, _ = setup

        assert sum(trained.curve[-100:]) < sum(trained.curve[:100])

    def test_fixed_baseline(self, setup):
        """Test fixed(1) is the normalisation reference and sees every boundary at once"""
        fixed = setup[2]["fixed"].metrics

        assert fixed.normalized_ble == 1.0
        assert fixed.cl_misses == 0
        assert fixed.missed_events == 0
        assert fixed.total_latency == 0

    def test_energy_bands(self, setup):
        metrics = {name: r.metrics for name, r in setup[2].items()}

        assert 0.005 <= metrics["min"].normalized_ble <= 0.06
        assert 0.05 <= metrics["clpa"].normalized_ble <= 0.20
        assert 0.05 <= metrics["qlbs"].normalized_ble <= 0.35

    def test_energy_ordering(self, setup):
        """Test the minimum interval wakes least and both adaptive schedulers beat fixed"""
        metrics = {name: r.metrics for name, r in setup[2].items()}

        assert metrics["min"].transmissions <= metrics["clpa"].transmissions
        assert metrics["clpa"].transmissions < metrics["fixed"].transmissions
        assert metrics["qlbs"].transmissions < metrics["fixed"].transmissions

    def test_latency_ordering(self, setup):
        """Test both adaptive schedulers react faster than the minimum interval"""
        metrics = {name: r.metrics for name, r in setup[2].items()}

        assert metrics["clpa"].total_latency <= metrics["min"].total_latency
        assert metrics["qlbs"].total_latency <= metrics["min"].total_latency

    def test_minimum_interval_misses_events(self, setup):
        assert setup[2]["min"].metrics.missed_events >= 1

    @pytest.mark.parametrize("policy", ["clpa", "qlbs", "min"])
    def test_misses_fall_inside_one_sleep(self, setup, policy):
        """Test every missed event is shorter than the sleep that spans its start"""
        trace, _, results = setup
        result = results[policy]

        for event in missed_events(trace, result):
            before = [d for d in result.decisions if d.wake_t < event.start][-1]
            assert event.duration < before.chosen_period
            assert before.wake_t + before.chosen_period >= event.end


class TestShortEventMiss:
    """Test cases for a class period longer than a neighbouring short event"""

    def test_event_between_two_wakes_is_missed(self):
        trace = trace_of((0, 25), (1, 5), (0, 30))
        catalog = catalog_of(2, cl_s=10)
        assignment = build_clpa_assignment(generator.intervals_by_class(trace), catalog)

        result = run_sim(trace, ClassPeriodPolicy(assignment, "clpa"), catalog)

        assert assignment.periods == {0: 17, 1: 5}
        assert [d.wake_t for d in result.decisions] == [0, 17, 34, 51]
        assert result.metrics.missed_events == 1
        assert result.metrics.cl_misses == 0
        assert result.metrics.transition_latencies == [4]


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_generous_rewards_trade_misses_for_energy(seed):
    """Test large rewards with small penalties wake less often and miss more deadlines"""
    trace, catalog = kitchen(seed)

    careful = train(trace, catalog, seed, RewardWeights.from_criteria("10/50", "5/1"))
    generous = train(trace, catalog, seed, RewardWeights.from_criteria("50/10", "50/10"))
    careful_run = run_sim(trace, QLearningPolicy(careful.table), catalog).metrics
    generous_run = run_sim(trace, QLearningPolicy(generous.table), catalog).metrics

    assert generous_run.transmissions < careful_run.transmissions
    assert generous_run.cl_misses > careful_run.cl_misses


@pytest.mark.slow
def test_stricter_theta_updates_longer(kitchen_trace, kitchen_catalog):
    """Test update episodes never shrink as theta tightens, on fresh kitchen data"""
    old = train(kitchen_trace, kitchen_catalog, 1, cfg=TrainConfig(n_episodes=300))
    fresh, _ = kitchen(2)
    cap = 3000

    runs = [
        train(
            fresh,
            kitchen_catalog,
            2,
            cfg=TrainConfig(n_episodes=cap, mode=TrainMode.UPDATE, theta=theta, n_success=5),
            old=old,
        )
        for theta in (0.1, 0.01, 0.001)
    ]
    counts = [run.episodes_run for run in runs]

    assert counts == sorted(counts)
    assert counts[0] < cap
    assert runs[0].stopped_early
    for shorter, longer in zip(runs, runs[1:]):
        assert shorter.curve == longer.curve[: shorter.episodes_run]
