# steerkit/core/rng.py
import numpy as np

# First spawn-key element of each simulation stage
ANIMATION_STREAM = 0
COUNTS_STREAM = 1
BOOTSTRAP_STREAM = 2
BATCH_STREAM = 3


def stream(seed: int, *key: int) -> np.random.Generator:
    """
    Counter-based generator for task ``key`` under the run seed ``seed``.

    Streams for distinct keys are independent, so parallel tasks draw the same
    numbers whatever the scheduling order.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def child_seed(seed: int, *key: int) -> int:
    """A 64-bit seed for a sub-run, derived the same way as ``stream``."""
    return int(np.random.SeedSequence(seed, spawn_key=tuple(key)).generate_state(1, np.uint64)[0])
