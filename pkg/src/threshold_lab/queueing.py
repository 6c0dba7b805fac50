"""The emptying probability of a queue with Poisson arrivals.

Chain: ``Q_0 = q0``, ``Q_{i+1} = Q_i - 1 + Xi_{i+1}``, ``Xi_t ~ Poisson(f(t))``.
QEMPTY(f) is the probability that some ``Q_t`` equals 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .constraints import ConstraintSet, load_constraint_set
from .meanfield import poly_P
from .seeding import derive_seed, parallel_map
from .stats import wilson_interval

BLOCK = 10_000


@dataclass(frozen=True)
class RateFunction:
    """Arrival-rate schedule ``f(t)`` for chain steps ``t = 1, 2, ...``."""

    fn: Callable[[np.ndarray], np.ndarray]
    label: str
    constant: float | None = None

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=np.float64))

    def cumulative(self, horizon: int) -> np.ndarray:
        """``out[t] = f(1) + ... + f(t)``, with ``out[0] = 0``."""
        vals = np.asarray(self(np.arange(1, horizon + 1)), dtype=np.float64)
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise ValueError(f"rate {self.label} must be finite and nonnegative")
        out = np.zeros(horizon + 1)
        np.cumsum(vals, out=out[1:])
        return out


def _constant_fn(lam):
    def f(t):
        return np.full(np.shape(t), lam, dtype=np.float64)
    return f


def constant_rate(lam: float) -> RateFunction:
    if lam < 0:
        raise ValueError(f"rate must be nonnegative, got {lam}")
    return RateFunction(_constant_fn(float(lam)), f"const:{lam}", float(lam))


class _PolyP:
    def __init__(self, scale, coeffs):
        self.scale, self.coeffs = scale, coeffs

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        # P_2(t) = sum_j C(t, j-2) p_j with the falling-factorial binomial
        out = np.zeros_like(t)
        for d, pj in enumerate(self.coeffs):
            if pj:
                term = np.ones_like(t)
                for r in range(d):
                    term = term * (t - r) / (r + 1)
                out = out + pj * np.where(t >= d, term, 0.0)
        return self.scale * out


def poly_p_rate(c: float, S: ConstraintSet, k: int | None = None, delta: int | None = None) -> RateFunction:
    """``f(j) = c * (k!/delta_k) * P_2(j)``, the arrival schedule of positive unit clauses."""
    st = S.stats
    k = st.k if k is None else k
    delta = st.delta_k if delta is None else delta
    if delta <= 0:
        raise ValueError("delta_k must be positive for the P_2 rate schedule")
    coeffs = [st.p.get(j, 0) for j in range(2, st.k + 1)]
    scale = c * math.factorial(k) / delta
    const = scale * poly_P(S, 2, 0) if not any(coeffs[1:]) else None
    return RateFunction(_PolyP(scale, coeffs), f"polyP:{c},{k},{delta}", const)


def parse_rate(text: str) -> RateFunction:
    """Parse ``const:LAMBDA`` or ``polyP:c,k,delta,PATH``."""
    kind, _, arg = text.partition(":")
    if kind == "const":
        try:
            return constant_rate(float(arg))
        except ValueError:
            raise ValueError(f"bad constant rate {text!r}") from None
    if kind == "polyP":
        parts = arg.split(",", 3)
        if len(parts) != 4:
            raise ValueError(f"polyP rate needs c,k,delta,S-file, got {text!r}")
        c, k, delta, path = parts
        S = load_constraint_set(Path(path))
        return poly_p_rate(float(c), S, int(k), int(delta))
    raise ValueError(f"unknown rate kind {kind!r}; expected 'const:' or 'polyP:'")


def qempty_fixed_rate(lam: float, tol: float = 1e-12, max_iter: int = 10_000_000) -> float:
    """Smallest root of ``s = exp(lam (s - 1))`` by fixed-point iteration from 0."""
    if lam < 0:
        raise ValueError(f"rate must be nonnegative, got {lam}")
    if lam <= 1:
        return 1.0
    s = 0.0
    for _ in range(max_iter):
        nxt = math.exp(lam * (s - 1))
        if abs(nxt - s) < tol:
            return nxt
        s = nxt
    return s


def simulate_emptied(q0, cum: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Whether each chain (initial length ``q0[i]``) empties by ``len(cum) - 1``.

    A queue of length q cannot empty in fewer than q steps, and is empty
    after exactly q steps iff no customer arrived meanwhile, so the chain is
    advanced q steps at a time with one Poisson draw.
    """
    horizon = len(cum) - 1
    q = np.array(q0, dtype=np.int64, copy=True).ravel()
    if np.any(q < 0):
        raise ValueError("initial queue lengths must be nonnegative")
    t = np.zeros_like(q)
    emptied = q == 0
    active = np.flatnonzero(~emptied)
    while active.size:
        qa, ta = q[active], t[active]
        step = np.minimum(qa, horizon - ta)
        arrivals = rng.poisson(cum[ta + step] - cum[ta])
        newq = qa - step + arrivals
        newt = ta + step
        hit = (step == qa) & (newq == 0)
        emptied[active[hit]] = True
        q[active], t[active] = newq, newt
        active = active[~hit & (newt < horizon)]
    return emptied


@dataclass(frozen=True)
class QemptyEstimate:
    estimate: float
    ci95: tuple[float, float]
    trials: int
    horizon: int
    initial_queue: int
    emptied: int


def _block(args):
    cum, q0, size, seed = args
    return int(simulate_emptied(np.full(size, q0), cum, np.random.default_rng(seed)).sum())


def qempty_mc(rate: RateFunction, trials: int, horizon: int, q0: int = 1, seed: int = 0,
              jobs: int | None = 1) -> QemptyEstimate:
    """Monte Carlo QEMPTY with a Wilson 95% interval; deterministic in ``seed``.

    Trials run in blocks of 10^4 and block ``b`` uses ``derive_seed(seed, b)``,
    so the result is the same for any number of workers.
    """
    if trials < 1 or horizon < 1:
        raise ValueError("trials and horizon must both be at least 1")
    cum = rate.cumulative(horizon)
    sizes = [min(BLOCK, trials - s) for s in range(0, trials, BLOCK)]
    work = [(cum, q0, size, derive_seed(seed, b)) for b, size in enumerate(sizes)]
    emptied = sum(parallel_map(_block, work, jobs))
    return QemptyEstimate(emptied / trials, wilson_interval(emptied, trials), trials, horizon, q0, emptied)
