"""Named, independent random streams derived from one user seed.

Each subsystem gets its own PCG64 stream seeded from ``SeedSequence([seed, crc32(name)])``, so
adding draws in one subsystem never shifts another and the mapping is stable across processes.
"""

import zlib

import numpy as np

TRACE = "trace"
WINDOWS = "windows"
QLEARNING = "qlearning"
OPENWORLD = "openworld"
UPDATER = "updater"


def _subsystem_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def seed_sequence(seed: int, subsystem: str, *keys: int) -> np.random.SeedSequence:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence([seed, _subsystem_key(subsystem), *keys])


def rng_for(seed: int, subsystem: str, *keys: int) -> np.random.Generator:
    """Generator for a subsystem; extra integer keys derive sub-streams (e.g. one per second)."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, subsystem, *keys)))
