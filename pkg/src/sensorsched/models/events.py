from typing import Annotated

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class TraceError(ValueError):
    pass


class EventInterval(BaseModel):
    """A run of identical class ids in a trace. ``duration`` is T_e."""

    model_config = ConfigDict(frozen=True)

    class_id: int = Field(ge=0)
    start: int = Field(ge=0)
    duration: int = Field(ge=1)

    @property
    def end(self) -> int:
        return self.start + self.duration


class EventTrace(BaseModel):
    """Ground-truth class id for every second ``t = 0 .. length - 1``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    classes: np.ndarray
    num_classes: int = Field(ge=1)

    @field_validator("classes", mode="before")
    @classmethod
    def _as_array(cls, v: object) -> npt.NDArray[np.int64]:
        arr = np.array(v, dtype=np.int64)
        if arr.ndim != 1:
            raise TraceError(f"trace must be one-dimensional, got shape {arr.shape}")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_classes(self) -> "EventTrace":
        if self.classes.size == 0:
            raise TraceError("trace is empty")
        if self.classes.min() < 0 or self.classes.max() >= self.num_classes:
            raise TraceError(f"class ids must lie in [0, {self.num_classes})")
        return self

    @property
    def length(self) -> int:
        return int(self.classes.size)

    def class_at(self, t: int) -> int:
        if not 0 <= t < self.length:
            raise TraceError(f"t={t} outside trace of length {self.length}")
        return int(self.classes[t])

    def same_as(self, other: "EventTrace") -> bool:
        return self.num_classes == other.num_classes and np.array_equal(
            self.classes, other.classes
        )


class ClassProfile(BaseModel):
    """Duration range, latency constraint and transition weight of one event class."""

    name: str
    min_duration: int = Field(ge=1)
    max_duration: int = Field(ge=1)
    cl_s: int = Field(10, ge=0)
    weight: float = Field(1.0, gt=0.0)

    @model_validator(mode="after")
    def _check_range(self) -> "ClassProfile":
        if self.min_duration > self.max_duration:
            raise ValueError(
                f"{self.name}: min duration {self.min_duration} > max {self.max_duration}"
            )
        return self


class ClassCatalog(BaseModel):
    names: list[str]
    cl_s: list[Annotated[int, Field(ge=0)]]

    @model_validator(mode="after")
    def _check_lengths(self) -> "ClassCatalog":
        if not self.names:
            raise ValueError("catalog needs at least one class")
        if len(self.names) != len(self.cl_s):
            raise ValueError(f"{len(self.names)} names but {len(self.cl_s)} CL_s values")
        return self

    @property
    def num_classes(self) -> int:
        return len(self.names)

    def cl_of(self, class_id: int) -> int:
        return self.cl_s[class_id]

    @classmethod
    def from_profiles(cls, profiles: list[ClassProfile]) -> "ClassCatalog":
        return cls(names=[p.name for p in profiles], cl_s=[p.cl_s for p in profiles])


class SensorWindow(BaseModel):
    """One second of raw multichannel readings, ``channels`` shaped (C, W)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    timestamp: int = Field(ge=0)
    channels: np.ndarray

    @field_validator("channels", mode="before")
    @classmethod
    def _check_channels(cls, v: object) -> npt.NDArray[np.float64]:
        arr = np.asarray(v, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"window must be C x W, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("window contains non-finite readings")
        return arr
