"""Seeded random streams.

Every random draw in the package comes from NumPy's PCG64 bit generator fed by a
``SeedSequence(entropy=seed, spawn_key=stream)``. The 64-bit ``seed`` is the only
user-visible knob; ``stream`` is a tuple of small integers naming the consumer
(which MC block, which sweep trial, ...). Identical seed and stream always give
the same generator state, independent of how work is scheduled.
"""

from __future__ import annotations

import numpy as np

from .errors import RangeError

SEED_MAX = 2**64 - 1

# Stream namespaces; the first element of every spawn key.
STREAM_SAMPLE = 0
STREAM_MC = 1
STREAM_SWEEP = 2
STREAM_BENCH = 3


def check_seed(seed: int) -> int:
    try:
        value = int(seed)
    except (TypeError, ValueError) as exc:
        raise RangeError(f"seed must be an integer, got {seed!r}") from exc
    if value < 0 or value > SEED_MAX:
        raise RangeError(f"seed must be in [0, 2**64 - 1], got {value}")
    return value


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *stream: int) -> int:
    """Collapse (seed, stream) into a fresh 64-bit seed, e.g. for a sweep trial."""
    ss = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=tuple(int(s) for s in stream))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
