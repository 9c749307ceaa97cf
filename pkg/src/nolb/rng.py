"""Deterministic random streams.

All randomness flows from one 64-bit root seed through Philox, a
counter-based generator whose output is reproducible bit-for-bit across
platforms.  Independent substreams are derived with SeedSequence spawn
keys, one purpose code per use:

    initial-conditions   (INITIAL, realization_index)
    step-permutations    (PERMUTATION, realization_index)
    realization-seeds    (REALIZATION, realization_index)

A Monte Carlo realization first derives its own 64-bit root via the
REALIZATION stream; re-running that single realization with the derived
seed reproduces it exactly.
"""

from __future__ import annotations

import numpy as np

INITIAL = 0
PERMUTATION = 1
REALIZATION = 2

STREAM_LABELS = {
    INITIAL: "initial-conditions",
    PERMUTATION: "step-permutations",
    REALIZATION: "realization-seeds",
}


def substream(root_seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    """Philox generator for one (purpose, index) substream of a root seed."""
    seq = np.random.SeedSequence(root_seed, spawn_key=(purpose, index))
    return np.random.Generator(np.random.Philox(seq))


def realization_seed(root_seed: int, index: int) -> int:
    """Derived 64-bit root seed that reproduces realization `index` alone."""
    seq = np.random.SeedSequence(root_seed, spawn_key=(REALIZATION, index))
    lo, hi = seq.generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)
