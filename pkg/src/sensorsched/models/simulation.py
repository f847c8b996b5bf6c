from itertools import accumulate

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Observed class reported when the classifier rejects a window.
UNKNOWN_CLASS = -1


class SchedulerDecision(BaseModel):
    model_config = ConfigDict(frozen=True)

    wake_t: int = Field(ge=0)
    chosen_period: int = Field(ge=1)
    observed_class: int = Field(ge=UNKNOWN_CLASS)


class TransitionRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    boundary_t: int = Field(ge=0)
    detect_t: int = Field(ge=0)
    latency: int = Field(ge=0)
    class_id: int = Field(ge=0)


class SimMetrics(BaseModel):
    policy: str
    trace_length: int = Field(ge=1)
    transmissions: int = Field(ge=1)
    cl_misses: int = Field(ge=0)
    missed_events: int = Field(ge=0)
    num_intervals: int = Field(ge=1)
    transitions: list[TransitionRecord] = []

    @model_validator(mode="after")
    def _check_counts(self) -> "SimMetrics":
        if self.transmissions > self.trace_length:
            raise ValueError("more transmissions than seconds in the trace")
        if self.missed_events > self.num_intervals:
            raise ValueError("more missed events than intervals")
        return self

    @property
    def normalized_ble(self) -> float:
        return self.transmissions / self.trace_length

    @property
    def transition_latencies(self) -> list[int]:
        return [record.latency for record in self.transitions]

    @property
    def cumulative_latency(self) -> list[int]:
        return list(accumulate(self.transition_latencies))

    @property
    def total_latency(self) -> int:
        return sum(self.transition_latencies)

    def summary(self) -> dict[str, object]:
        return {
            "policy": self.policy,
            "transmissions": self.transmissions,
            "normalized_ble": self.normalized_ble,
            "cl_misses": self.cl_misses,
            "missed_events": self.missed_events,
            "total_latency": self.total_latency,
        }


class SimResult(BaseModel):
    metrics: SimMetrics
    decisions: list[SchedulerDecision]
