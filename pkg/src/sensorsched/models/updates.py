import enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from sensorsched.models.openworld import UnknownQueue
from sensorsched.models.scheduling import PeriodAssignment, QTable


class UpdateStatus(enum.StrEnum):
    SUCCESS = "success"
    FAIL = "fail"
    INSUFFICIENT_INTERVALS = "insufficient_intervals"


class UpdateMode(enum.StrEnum):
    CLASSIFIER = "classifier"
    SCHEDULER = "scheduler"


class SchedulerType(enum.StrEnum):
    CLPA = "clpa"
    QLBS = "qlbs"


class UpdateLogEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: int = Field(ge=0)
    mode: UpdateMode
    t_sp: int = Field(ge=1)
    samples_trained: int = Field(ge=0)
    queue_remaining: int = Field(ge=0)
    status: UpdateStatus


class SchedulerUpdate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    status: UpdateStatus
    assignment: PeriodAssignment | None = None
    table: QTable | None = None
    episodes_run: int = 0


class UpdateRequest(BaseModel):
    """Work for the updater. Classifier mode carries the queue of samples of one new class."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    mode: UpdateMode
    queue: UnknownQueue | None = None
    label: int | None = None
    scheduler_type: SchedulerType | None = None

    @model_validator(mode="after")
    def _check_mode(self) -> "UpdateRequest":
        if self.mode == UpdateMode.CLASSIFIER and (self.queue is None or self.label is None):
            raise ValueError("a classifier update needs a sample queue and a label")
        if self.mode == UpdateMode.SCHEDULER and self.scheduler_type is None:
            raise ValueError("a scheduler update needs a scheduler type")
        return self

    @property
    def n_pending(self) -> int:
        return len(self.queue) if self.queue is not None else 0
