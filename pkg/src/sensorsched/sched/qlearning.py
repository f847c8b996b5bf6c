"""Q-learning based scheduler (QLBS).

States are (class observed at the wake, previous period) and actions are the next period,
1..a_max seconds. Rewards:

* the sleep reaches the end of the current event: +w_p1 if it overshoots by at most CL_s of
  that event's class, otherwise -w_n1;
* the event is still going on at the next wake: +w_p2 if the period did not shrink, otherwise
  -w_n2.
"""

import logging
import math
from typing import NamedTuple

import numpy as np

from sensorsched.models.events import ClassCatalog, EventTrace, TraceError
from sensorsched.models.scheduling import (
    A_MAX,
    QState,
    QTable,
    RewardWeights,
    ScheduleError,
    TrainConfig,
    TrainMode,
)

logger = logging.getLogger(__name__)

_PROGRESS_EVERY = 1000


def _event_ends(trace: EventTrace) -> np.ndarray:
    """For every second, when the event in progress ends; infinity inside the final event."""
    classes = trace.classes
    ends = np.empty(classes.size, dtype=np.float64)
    change = np.flatnonzero(np.diff(classes)) + 1
    starts = np.concatenate(([0], change))
    stops = np.concatenate((change, [classes.size]))
    for start, stop in zip(starts, stops):
        ends[start:stop] = stop
    ends[starts[-1] :] = math.inf
    return ends


class TraceCursor:
    """Training environment: a position in a trace and the time left in the current event."""

    def __init__(self, trace: EventTrace, t: int = 0):
        self.trace = trace
        self._classes = trace.classes.tolist()
        self._ends = _event_ends(trace).tolist()
        self.t = t

    @property
    def length(self) -> int:
        return len(self._classes)

    @property
    def done(self) -> bool:
        return self.t >= len(self._classes)

    @property
    def current_class(self) -> int:
        if self.done:
            raise TraceError(f"t={self.t} outside trace of length {self.length}")
        return self._classes[self.t]

    @property
    def last_class(self) -> int:
        return self._classes[-1]

    @property
    def t_ideal(self) -> float:
        """Seconds until the current event's class changes."""
        if self.done:
            raise TraceError("cursor is past the end of the trace")
        return self._ends[self.t] - self.t

    def advance(self, seconds: int) -> None:
        self.t += seconds

    def reset(self, t: int = 0) -> None:
        self.t = t


def reward_for(
    action: int, prev_period: int, t_ideal: float, cl_s: int, weights: RewardWeights
) -> float:
    if action >= t_ideal:
        return weights.w_p1 if action - t_ideal <= cl_s else -weights.w_n1
    return weights.w_p2 if action >= prev_period else -weights.w_n2


def take_action(
    state: QState,
    action: int,
    cursor: TraceCursor,
    weights: RewardWeights,
    cl_s: int,
    a_max: int = A_MAX,
) -> tuple[QState, float]:
    """Sleep ``action`` seconds from the cursor's position and score the choice.

    The next state's class is the one active at the wake; past the end of the trace it is the
    last class of the trace.
    """
    if not 1 <= action <= a_max:
        raise ScheduleError(f"action {action} outside [1, {a_max}]")
    reward = reward_for(action, state.prev_period, cursor.t_ideal, cl_s, weights)
    cursor.advance(action)
    next_class = cursor.last_class if cursor.done else cursor.current_class
    return QState(next_class, action), reward


def q_update(
    q: float, reward: float, next_best: float, alpha: float, gamma: float, terminal: bool
) -> float:
    target = reward if terminal else reward + gamma * next_best
    return (1.0 - alpha) * q + alpha * target


class TrainResult(NamedTuple):
    table: QTable
    curve: list[float]
    episodes_run: int
    stopped_early: bool


def qlbs_train(
    trace: EventTrace,
    catalog: ClassCatalog,
    cfg: TrainConfig,
    weights: RewardWeights,
    rng: np.random.Generator,
    old_table: QTable | None = None,
    a_max: int = A_MAX,
) -> TrainResult:
    """Epsilon-greedy tabular Q-learning over whole-trace episodes.

    Every episode starts at t=0 in state (first class, 1). Greedy ties are broken uniformly at
    random. In update mode training stops once the per-episode share of negative rewards has
    moved by at most theta for n_success episodes in a row.

    Each episode draws its random numbers up front, so the stream never depends on theta.
    """
    if trace.length < 1:
        raise TraceError("cannot train on an empty trace")
    if trace.num_classes > catalog.num_classes:
        raise ScheduleError(
            f"trace has {trace.num_classes} classes, catalog only {catalog.num_classes}"
        )
    if cfg.mode == TrainMode.UPDATE and old_table is None:
        raise ScheduleError("update mode needs an existing Q-table")
    if old_table is not None and (
        old_table.num_classes != catalog.num_classes or old_table.a_max != a_max
    ):
        raise ScheduleError(f"existing {old_table!r} does not match the catalog and a_max")

    table = old_table.copy() if old_table is not None else QTable(catalog.num_classes, a_max)
    q = table.weights
    cursor = TraceCursor(trace)
    cl = list(catalog.cl_s)
    length = trace.length
    alpha, gamma, epsilon = cfg.alpha, cfg.gamma, cfg.epsilon

    curve: list[float] = []
    prev_avg = 0.0
    successes = 0
    stopped_early = False

    for episode in range(cfg.n_episodes):
        explore = (rng.random(length) < epsilon).tolist()
        random_actions = rng.integers(1, a_max + 1, size=length).tolist()
        tie_draws = rng.random(length).tolist()

        cursor.reset()
        state = QState(cursor.current_class, 1)
        steps = 0
        negatives = 0
        while not cursor.done:
            s = state.class_id * a_max + state.prev_period - 1
            if explore[steps]:
                action = random_actions[steps]
            else:
                row = q[s]
                best = np.flatnonzero(row == row.max())
                action = int(best[int(tie_draws[steps] * best.size)]) + 1

            next_state, reward = take_action(
                state, action, cursor, weights, cl[state.class_id], a_max
            )
            terminal = cursor.done
            next_s = next_state.class_id * a_max + action - 1
            next_best = 0.0 if terminal else float(q[next_s].max())
            q[s, action - 1] = q_update(q[s, action - 1], reward, next_best, alpha, gamma, terminal)

            negatives += reward < 0
            steps += 1
            state = next_state

        avg_penalty = negatives / steps
        curve.append(avg_penalty)
        if (episode + 1) % _PROGRESS_EVERY == 0:
            logger.info(f"Episode {episode + 1}/{cfg.n_episodes}: avg penalty {avg_penalty:.4f}")

        if cfg.mode == TrainMode.UPDATE:
            successes = successes + 1 if abs(avg_penalty - prev_avg) <= cfg.theta else 0
            prev_avg = avg_penalty
            if successes >= cfg.n_success:
                stopped_early = episode + 1 < cfg.n_episodes
                logger.info(f"Update converged after {episode + 1} episodes (theta={cfg.theta})")
                break

    return TrainResult(table, curve, len(curve), stopped_early)


def qlbs_decide(table: QTable, state: QState) -> int:
    """Greedy period for a state; ties go to the shortest period."""
    return int(np.argmax(table.row(state))) + 1
