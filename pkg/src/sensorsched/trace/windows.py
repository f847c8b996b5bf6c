"""Synthetic stand-in for the sensor board: one C x W window of readings per second.

Every class has its own signature. Channel ``j`` of class ``c`` carries a sinusoid at FFT bin
``1 + 2c mod (W/2 - 1)`` with amplitude ``(1 + 0.25 j)(1 + amplitude_step * c)`` and phase
``j pi/4``, shifted by ``offset_step * c``. Gaussian noise is seeded per second, so a window
depends only on (class, t, seed).
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sensorsched import seeding
from sensorsched.models.events import EventTrace, SensorWindow, TraceError


class WindowParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    channels: int = Field(4, ge=1)
    samples: int = Field(32, ge=2)
    offset_step: float = 1.0
    amplitude_step: float = Field(0.1, ge=0.0)
    noise: float = Field(0.1, ge=0.0)


DEFAULT_WINDOW = WindowParams()


def signature_bin(class_id: int, samples: int) -> int:
    usable = max(samples // 2 - 1, 1)
    return 1 + (2 * class_id) % usable


def class_signal(class_id: int, params: WindowParams = DEFAULT_WINDOW) -> np.ndarray:
    """The noiseless C x W signature of a class."""
    n = np.arange(params.samples)
    j = np.arange(params.channels)[:, None]
    k = signature_bin(class_id, params.samples)
    amplitude = (1.0 + 0.25 * j) * (1.0 + params.amplitude_step * class_id)
    phase = j * np.pi / 4
    wave = amplitude * np.sin(2 * np.pi * k * n / params.samples + phase)
    return params.offset_step * class_id + wave


def synthesize_class_window(
    class_id: int, t: int, seed: int, params: WindowParams = DEFAULT_WINDOW
) -> SensorWindow:
    if class_id < 0:
        raise TraceError(f"class id must be >= 0, got {class_id}")
    readings = class_signal(class_id, params)
    if params.noise > 0:
        rng = seeding.rng_for(seed, seeding.WINDOWS, t)
        readings = readings + params.noise * rng.standard_normal(readings.shape)
    return SensorWindow(timestamp=t, channels=readings)


def synthesize_window(
    trace: EventTrace, t: int, seed: int, params: WindowParams = DEFAULT_WINDOW
) -> SensorWindow:
    """The window the sensor would read at second ``t`` of the trace."""
    if not 0 <= t < trace.length:
        raise TraceError(f"t={t} outside trace of length {trace.length}")
    return synthesize_class_window(trace.class_at(t), t, seed, params)
