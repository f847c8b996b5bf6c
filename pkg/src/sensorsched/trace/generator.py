import logging
import re
from collections import defaultdict
from typing import Mapping, Sequence

import numpy as np

from sensorsched import seeding
from sensorsched.models.events import ClassProfile, EventInterval, EventTrace, TraceError

logger = logging.getLogger(__name__)

DEFAULT_CL_S = 10

# (name, min seconds, max seconds)
_KITCHEN = [
    ("None", 20, 120),
    ("Microwave", 30, 90),
    ("Kettle", 60, 180),
    ("Faucet", 5, 30),
    ("Waste Disposer", 5, 20),
    ("Vent Fan", 60, 300),
]

PROFILES = ("kitchen",)


def kitchen_profiles(cl_s: int = DEFAULT_CL_S) -> list[ClassProfile]:
    return [
        ClassProfile(name=name, min_duration=lo, max_duration=hi, cl_s=cl_s)
        for name, lo, hi in _KITCHEN
    ]


def get_profiles(name: str) -> list[ClassProfile]:
    if name == "kitchen":
        return kitchen_profiles()
    raise TraceError(f"unknown profile {name!r}, expected one of {PROFILES}")


_OVERRIDE_KEY = re.compile(r"^(?:class\.(\d+)\.(min|max|weight)|cl\.(\d+))$")
_OVERRIDE_FIELD = {"min": "min_duration", "max": "max_duration", "weight": "weight"}


def apply_overrides(
    profiles: Sequence[ClassProfile], overrides: Mapping[str, str]
) -> list[ClassProfile]:
    """Apply ``class.<id>.min|max|weight`` and ``cl.<id>`` keys to a profile list."""
    updates: dict[int, dict[str, str]] = defaultdict(dict)
    for key, value in overrides.items():
        match = _OVERRIDE_KEY.match(key)
        if not match:
            raise TraceError(f"unrecognised profile key {key!r}")
        class_field, field, cl_class = match.groups()
        class_id = int(class_field if class_field is not None else cl_class)
        if class_id >= len(profiles):
            raise TraceError(f"{key!r} names class {class_id}, profile has {len(profiles)}")
        updates[class_id]["cl_s" if cl_class is not None else _OVERRIDE_FIELD[field]] = value

    result = []
    for class_id, profile in enumerate(profiles):
        if class_id in updates:
            profile = ClassProfile.model_validate({**profile.model_dump(), **updates[class_id]})
        result.append(profile)
    return result


def _fill_table(length: int, lows: Sequence[int], highs: Sequence[int]) -> list[list[bool]]:
    """``fits[r][c]``: r seconds split into in-range intervals, the first of class c, with no
    class following itself."""
    num_classes = len(lows)
    fits = [[False] * num_classes for _ in range(length + 1)]
    # prefix[c][i]: how many r < i can follow an interval of class c
    prefix = [[0] * (length + 2) for _ in range(num_classes)]
    for c in range(num_classes):
        prefix[c][1] = 1
    for r in range(1, length + 1):
        row = fits[r]
        for c in range(num_classes):
            last = r - lows[c]
            if last >= 0:
                row[c] = prefix[c][last + 1] > prefix[c][max(0, r - highs[c])]
        n_fit = sum(row)
        for c in range(num_classes):
            prefix[c][r + 1] = prefix[c][r] + (n_fit - row[c] > 0)
    return fits


def _can_follow(fits: list[list[bool]], left: int, class_id: int) -> bool:
    return left == 0 or any(ok for k, ok in enumerate(fits[left]) if k != class_id)


def generate_trace(seed: int, length: int, profiles: Sequence[ClassProfile]) -> EventTrace:
    """Random event trace of exactly ``length`` seconds.

    The trace starts in class 0. Durations are uniform integers in each class's range, and the
    next class is drawn from the other classes in proportion to their weights. A draw that
    would leave seconds no in-range sequence can fill is redrawn among the choices that can,
    so every interval, the last one included, lies in its class's range.
    """
    if not profiles:
        raise TraceError("no class profiles given")
    if length < 1:
        raise TraceError(f"length must be >= 1, got {length}")

    rng = seeding.rng_for(seed, seeding.TRACE)
    num_classes = len(profiles)
    weights = np.array([p.weight for p in profiles], dtype=np.float64)
    lows = [p.min_duration for p in profiles]
    highs = [p.max_duration for p in profiles]

    fits = _fill_table(length, lows, highs)
    if not fits[length][0]:
        raise TraceError(f"no sequence of in-range intervals fills {length}s from class 0")

    classes = np.empty(length, dtype=np.int64)
    t = 0
    class_id = 0
    while t < length:
        left = length - t
        duration = int(rng.integers(lows[class_id], highs[class_id] + 1))
        if duration < left and not _can_follow(fits, left - duration, class_id):
            viable = [
                d
                for d in range(lows[class_id], min(highs[class_id], left) + 1)
                if _can_follow(fits, left - d, class_id)
            ]
            logger.debug(f"Redrawing {duration}s at t={t} among {len(viable)} viable durations")
            duration = int(rng.choice(viable))
        duration = min(duration, left)
        classes[t : t + duration] = class_id
        t += duration
        if num_classes > 1:
            others = np.delete(np.arange(num_classes), class_id)
            p = weights[others] / weights[others].sum()
            class_id = int(rng.choice(others, p=p))
            if t < length and not fits[length - t][class_id]:
                viable = others[[fits[length - t][k] for k in others]]
                p = weights[viable] / weights[viable].sum()
                class_id = int(rng.choice(viable, p=p))

    logger.debug(f"Generated {length}s trace over {num_classes} classes (seed={seed})")
    return EventTrace(classes=classes, num_classes=num_classes)


def intervals_of(trace: EventTrace) -> list[EventInterval]:
    """Run-length encode a trace into its event intervals."""
    classes = trace.classes
    change = np.flatnonzero(np.diff(classes)) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [classes.size]))
    return [
        EventInterval(class_id=int(classes[s]), start=int(s), duration=int(e - s))
        for s, e in zip(starts, ends)
    ]


def reconstruct(intervals: Sequence[EventInterval], num_classes: int) -> EventTrace:
    """Rebuild a trace from contiguous intervals starting at t=0."""
    if not intervals:
        raise TraceError("no intervals to rebuild a trace from")
    expected_start = 0
    for interval in intervals:
        if interval.start != expected_start:
            raise TraceError(f"gap or overlap at t={expected_start}")
        expected_start = interval.end
    classes = np.concatenate(
        [np.full(interval.duration, interval.class_id, dtype=np.int64) for interval in intervals]
    )
    return EventTrace(classes=classes, num_classes=num_classes)


def intervals_by_class(trace: EventTrace) -> dict[int, list[int]]:
    """T_e values of every class that occurs in the trace, in order of occurrence."""
    grouped: dict[int, list[int]] = defaultdict(list)
    for interval in intervals_of(trace):
        grouped[interval.class_id].append(interval.duration)
    return dict(grouped)
