"""Counter-based random streams keyed by (master seed, stream ids)."""

import numpy as np


def rng_stream(master_seed: int, *keys: int) -> np.random.Generator:
    """
    Independent generator for one unit of work.

    The stream depends only on the master seed and the keys (batch id, start index,
    ...), never on which worker thread draws from it, so results are identical for
    any worker count. Philox is counter based, so distinct keys give streams that
    do not overlap.
    """
    sequence = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(sequence))
