"""Seed derivation and deterministic parallel maps.

All randomness in the package descends from one 64-bit master seed.  Work is
split into indexed units; unit ``i`` always gets ``derive_seed(master, i)``,
so results do not depend on how many workers ran them.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

T = TypeVar("T")
R = TypeVar("R")


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer (Steele, Lea & Flood 2014)."""
    x = (x + GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, index: int) -> int:
    # mixing master first keeps (s, i) and (s', i') from colliding along diagonals
    return splitmix64(splitmix64(master & MASK64) ^ ((index * GOLDEN) & MASK64))


def derive_seeds(master: int, count: int, start: int = 0) -> np.ndarray:
    """Vectorized ``derive_seed`` for indices ``start .. start+count-1``."""
    m = np.uint64(splitmix64(master & MASK64))
    idx = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = m ^ (idx * np.uint64(GOLDEN))
        x = x + np.uint64(GOLDEN)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        x = x ^ (x >> np.uint64(31))
    return x


def rng_for(master: int, *path: int) -> np.random.Generator:
    """Generator for the work unit addressed by ``path`` under ``master``."""
    s = master
    for i in path:
        s = derive_seed(s, i)
    return np.random.default_rng(s)


def default_jobs() -> int:
    env = os.environ.get("THRESHOLD_LAB_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"THRESHOLD_LAB_JOBS must be an integer, got {env!r}") from None
    return 1


def _run_chunk(args):
    fn, items = args
    return [fn(x) for x in items]


def parallel_map(fn: Callable[[T], R], items: Sequence[T], jobs: int | None = None) -> list[R]:
    """Ordered map; ``fn`` must be picklable when ``jobs > 1``."""
    jobs = default_jobs() if jobs is None else jobs
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    nchunks = min(len(items), jobs * 4)
    bounds = np.linspace(0, len(items), nchunks + 1).astype(int)
    chunks = [(fn, items[a:b]) for a, b in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        out = []
        for part in pool.map(_run_chunk, chunks):
            out.extend(part)
    return out
