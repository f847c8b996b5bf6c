import abc
import logging

from sensorsched.models.scheduling import PeriodAssignment, QState, QTable
from sensorsched.sched.clpa import FALLBACK_PERIOD, clpa_decide
from sensorsched.sched.qlearning import qlbs_decide

logger = logging.getLogger(__name__)


class SchedulingPolicy(abc.ABC):
    """Chooses the next sensing period from the class observed at a wake."""

    def __init__(self, name: str):
        self.name = name

    def reset(self) -> None:
        """Forget per-run state before a new simulation."""

    @abc.abstractmethod
    def decide(self, observed_class: int) -> int:
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class FixedPeriodPolicy(SchedulingPolicy):
    def __init__(self, period: int = 1, name: str = "fixed"):
        super().__init__(name)
        if period < 1:
            raise ValueError(f"period must be >= 1, got {period}")
        self.period = period

    def decide(self, observed_class: int) -> int:
        return self.period


class ClassPeriodPolicy(SchedulingPolicy):
    """One fixed period per class (CLPA or minimum interval)."""

    def __init__(self, assignment: PeriodAssignment, name: str):
        super().__init__(name)
        self.assignment = assignment

    def decide(self, observed_class: int) -> int:
        return clpa_decide(self.assignment, observed_class)


class QLearningPolicy(SchedulingPolicy):
    """Greedy policy of a trained Q-table; remembers the period it chose last."""

    def __init__(self, table: QTable, name: str = "qlbs"):
        super().__init__(name)
        self.table = table
        self.prev_period = 1

    def reset(self) -> None:
        self.prev_period = 1

    def decide(self, observed_class: int) -> int:
        if not 0 <= observed_class < self.table.num_classes:
            logger.debug(f"Unknown class {observed_class}, using {FALLBACK_PERIOD}s")
            self.prev_period = FALLBACK_PERIOD
            return FALLBACK_PERIOD
        period = qlbs_decide(self.table, QState(observed_class, self.prev_period))
        self.prev_period = period
        return period
