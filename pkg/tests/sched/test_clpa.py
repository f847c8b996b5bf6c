import numpy as np
import pytest

from sensorsched.models.scheduling import PeriodAssignment
from sensorsched.sched import clpa
from tests.conftest import catalog_of


def _meets_latency(durations: list[int], period: int, cl_s: int) -> bool:
    return all(-(-d // period) * period - d <= cl_s for d in durations)


def brute_force_period(durations: list[int], cl_s: int) -> int | None:
    feasible = [p for p in range(2, min(durations) + 1) if _meets_latency(durations, p, cl_s)]
    return max(feasible, default=None)


class TestClpaAssign:
    """Test cases for clpa_assign"""

    def test_equal_durations(self):
        """Test identical events get their own duration as period"""
        assert clpa.clpa_assign([10, 10, 10], 2) == 10

    def test_mixed_durations(self):
        """Test a pair that only period 2 satisfies"""
        assert clpa.clpa_assign([6, 10], 1) == 2

    def test_zero_latency(self):
        """Test CL_s=0 with a single duration"""
        assert clpa.clpa_assign([3], 0) == 3

    def test_empty_is_infeasible(self):
        """Test an empty interval list has no period"""
        assert clpa.clpa_assign([], 2) is None

    def test_infeasible(self):
        """Test durations no period >= 2 can serve at CL_s=0"""
        assert clpa.clpa_assign([3, 4], 0) is None

    def test_one_second_events(self):
        """Test a one second event leaves no period >= 2"""
        assert clpa.clpa_assign([1, 8], 5) is None

    def test_negative_cl(self):
        """Test that a negative CL_s is an error"""
        with pytest.raises(ValueError):
            clpa.clpa_assign([5], -1)

    def test_matches_brute_force(self):
        """Test random duration sets against an exhaustive check of every period"""
        rng = np.random.default_rng(11)
        for trial in range(1000):
            durations = rng.integers(1, 301, size=rng.integers(1, 21)).tolist()
            if trial % 20 == 0:
                durations.append(1)
            cl_s = int(rng.integers(0, 6))

            period = clpa.clpa_assign(durations, cl_s)

            assert period == brute_force_period(durations, cl_s), (durations, cl_s)
            if period is not None:
                assert 2 <= period <= min(durations)
                assert _meets_latency(durations, period, cl_s)

    def test_assigned_period_meets_latency(self):
        """Test the overshoot past every event end stays within CL_s"""
        durations = [23, 41, 57, 30]

        period = clpa.clpa_assign(durations, 4)

        assert period is not None
        assert all((-d) % period <= 4 for d in durations)


class TestMinIntervalAssign:
    """Test cases for the minimum-interval baseline"""

    def test_minimum_per_class(self):
        """Test each class gets its shortest event"""
        assignment = clpa.min_interval_assign({0: [5, 30], 1: [800]})

        assert assignment.periods == {0: 5, 1: 800}

    def test_empty_class_left_out(self):
        """Test a class without intervals gets no period"""
        assignment = clpa.min_interval_assign({0: [7], 1: []})

        assert assignment.period_for(1) is None
        assert clpa.clpa_decide(assignment, 1) == clpa.FALLBACK_PERIOD


class TestBuildClpaAssignment:
    """Test cases for build_clpa_assignment"""

    def test_feasible_classes(self):
        """Test every feasible class is assigned"""
        assignment = clpa.build_clpa_assignment({0: [10, 10], 1: [6, 10]}, catalog_of(2, cl_s=1))

        assert assignment.periods == {0: 10, 1: 2}

    def test_retry_with_larger_latency(self):
        """Test an infeasible class is retried at CL_s=1"""
        assignment = clpa.build_clpa_assignment({0: [3, 4]}, catalog_of(1, cl_s=0))

        assert assignment.periods == {0: 2}

    def test_unassignable_class_falls_back(self):
        """Test a class with one second events keeps the fallback period"""
        assignment = clpa.build_clpa_assignment({0: [1, 5], 1: [9]}, catalog_of(2, cl_s=0))

        assert 0 not in assignment.periods
        assert clpa.clpa_decide(assignment, 0) == 1
        assert clpa.clpa_decide(assignment, 1) == 9


class TestClpaDecide:
    """Test cases for clpa_decide"""

    def test_assigned_class(self):
        """Test an assigned class gets its period"""
        assert clpa.clpa_decide(PeriodAssignment(periods={5: 33}), 5) == 33

    def test_unknown_class(self):
        """Test an unknown class falls back to 1"""
        assert clpa.clpa_decide(PeriodAssignment(periods={5: 33}), -1) == 1


class TestPeriodAssignment:
    """Test cases for PeriodAssignment helpers"""

    def test_scaled(self):
        """Test every period is multiplied"""
        assert PeriodAssignment(periods={0: 3, 1: 5}).scaled(2).periods == {0: 6, 1: 10}

    def test_overrides(self):
        """Test overrides replace single classes"""
        assignment = PeriodAssignment(periods={0: 3, 5: 12}).with_overrides({5: 33})

        assert assignment.periods == {0: 3, 5: 33}

    def test_frame(self):
        """Test the class_id,T_sp layout"""
        assignment = PeriodAssignment(periods={1: 4, 0: 3})

        frame = assignment.to_frame()

        assert list(frame.columns) == ["class_id", "T_sp"]
        assert frame["class_id"].tolist() == [0, 1]
        assert PeriodAssignment.from_frame(frame) == assignment
