"""Interval estimates shared by the Monte Carlo routines."""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm

Z95 = float(norm.ppf(0.975))


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # clamp so the interval always contains phat despite rounding at 0 and 1
    return max(0.0, min(centre - half, phat)), min(1.0, max(centre + half, phat))


def bootstrap_interval(samples, statistic, rng: np.random.Generator, reps: int = 1000, level: float = 0.95):
    """Percentile bootstrap; ``statistic`` maps a (reps, n) array to (reps,)."""
    samples = np.asarray(samples)
    idx = rng.integers(0, len(samples), size=(reps, len(samples)))
    vals = statistic(samples[idx])
    lo, hi = np.quantile(vals, [(1 - level) / 2, (1 + level) / 2])
    return float(lo), float(hi)
