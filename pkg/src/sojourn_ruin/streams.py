"""Reproducible random-number streams.

Every Monte Carlo routine in this package draws from per-path
substreams of a counter-based Philox generator, so results depend only
on (seed, path index) and are identical no matter how paths are
batched or distributed over threads.
"""

from __future__ import annotations

import os

import numpy as np

_MASK128 = (1 << 128) - 1


def resolve_seed(seed: int | None) -> int:
    """Return seed itself, or fresh OS entropy when seed is None."""
    if seed is None:
        return int(np.random.SeedSequence().entropy) & _MASK128
    return int(seed)


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for path ``index`` under ``seed``."""
    bits = np.random.Philox(key=seed & _MASK128)
    return np.random.Generator(bits.jumped(index))


def thread_count() -> int:
    """Worker count for embarrassingly parallel path loops.

    Controlled by SOJOURN_RUIN_THREADS; defaults to 1 (serial) because
    the path math is already vectorized and oversubscribing BLAS hurts.
    """
    raw = os.environ.get("SOJOURN_RUIN_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
