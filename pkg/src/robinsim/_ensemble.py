"""Deterministic block decomposition shared by the ensemble engines.

Trajectories are partitioned into fixed-size blocks; block b draws from its own
counter-based Philox stream keyed by SeedSequence(seed, spawn_key=(b,)). Block
outputs are integer counts merged by addition, so results are bitwise identical
for any worker count or execution order. BLOCK_SIZE is part of that contract:
changing it changes the stream layout and therefore the sampled trajectories.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from functools import partial
import multiprocessing

import numpy as np

BLOCK_SIZE = 1 << 16
DEFAULT_SEED = 0x5EED


def n_blocks(n: int) -> int:
    return (n + BLOCK_SIZE - 1) // BLOCK_SIZE


def block_count(n: int, block: int) -> int:
    """Number of trajectories in block `block` of an n-trajectory ensemble."""
    lo = block * BLOCK_SIZE
    return min(n, lo + BLOCK_SIZE) - lo


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,)))
    )


def map_blocks(fn, config, n: int, n_workers: int):
    """Yield fn(config, block) for every block, optionally on a process pool."""
    nb = n_blocks(n)
    if n_workers <= 1:
        for b in range(nb):
            yield fn(config, b)
        return
    ctx = multiprocessing.get_context("fork")
    chunk = max(1, nb // (4 * n_workers))
    with ProcessPoolExecutor(max_workers=n_workers, mp_context=ctx) as pool:
        yield from pool.map(partial(fn, config), range(nb), chunksize=chunk)
