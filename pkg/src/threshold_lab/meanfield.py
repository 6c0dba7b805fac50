"""Deterministic mean-field predictions for clause counts along a PUR run.

``x[i, t]`` and ``y[i, t]`` are per-slot clause densities at stage ``t``:
E[P_{i,t}] = i * C(t, i) * x[i, t] and E[N_{i,t}] = C(t, i) * y[i, t].
Going one stage down, each size-i density picks up the size-(i+1) density,
``x[i, t-1] = x[i, t] + x[i+1, t]``, i.e. ``Z_{t-1} = (I + A) Z_t`` with the
upper shift matrix ``A``.  All of this is carried out in exact rationals.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .constraints import ConstraintSet
from .formula import universe_size


def _binomial_sum(coeffs: dict[int, int], k: int, i: int, c: int) -> int:
    if not 1 <= i <= k:
        raise ValueError(f"index i = {i} outside 1..{k}")
    if c < 0:
        raise ValueError(f"c must be nonnegative, got {c}")
    return sum(comb(c, j - i) * coeffs[j] for j in range(i, k + 1))


def poly_P(S: ConstraintSet, i: int, c: int) -> int:
    st = S.stats
    return _binomial_sum(st.p, st.k, i, c)


def poly_Q(S: ConstraintSet, i: int, c: int) -> int:
    st = S.stats
    return _binomial_sum(st.n, st.k, i, c)


def shift_matrix(size: int) -> np.ndarray:
    return np.eye(size, k=1, dtype=np.int64)


@dataclass(frozen=True)
class MeanFieldState:
    n: int
    m: int
    k: int
    stage_count: int
    x: dict[tuple[int, int], Fraction]
    y: dict[tuple[int, int], Fraction]
    alpha: Fraction  # m / N_S, the asymptotic normalisation
    alpha_exact: Fraction  # m / (exact universe size), used for initialisation

    @property
    def stages(self) -> range:
        return range(self.n, self.n - self.stage_count - 1, -1)

    def closed_form_x(self, i: int, c: int) -> Fraction:
        """x at stage n - c from the binomial closed form of the recurrence."""
        return sum((comb(c, j - i) * self.x[j, self.n] for j in range(i, self.k + 1)), Fraction(0))

    def closed_form_y(self, i: int, c: int) -> Fraction:
        return sum((comb(c, j - i) * self.y[j, self.n] for j in range(i, self.k + 1)), Fraction(0))


def mf_trajectory(S: ConstraintSet, n: int, m: int, stage_count: int) -> MeanFieldState:
    """Iterate the density recurrences from exact multiset-model expectations at stage n."""
    st = S.stats
    k = st.k
    if not 0 <= stage_count <= n:
        raise ValueError(f"stage_count must lie in 0..{n}, got {stage_count}")
    U = universe_size(S, n)
    N_S = comb(n, k) * st.delta_k
    alpha_exact = Fraction(m, U)
    x: dict[tuple[int, int], Fraction] = {}
    y: dict[tuple[int, int], Fraction] = {}
    for i in range(2, k + 1):
        # a size-i one-positive template has i*C(n,i) instantiations, all-negative C(n,i)
        x[i, n] = alpha_exact * st.p[i]
        y[i, n] = alpha_exact * st.n[i]
    for t in range(n, n - stage_count, -1):
        for i in range(2, k + 1):
            x[i, t - 1] = x[i, t] + (x[i + 1, t] if i < k else 0)
            y[i, t - 1] = y[i, t] + (y[i + 1, t] if i < k else 0)
    return MeanFieldState(
        n=n,
        m=m,
        k=k,
        stage_count=stage_count,
        x=x,
        y=y,
        alpha=Fraction(m, N_S) if N_S else Fraction(0),
        alpha_exact=alpha_exact,
    )


def predicted_counts(state: MeanFieldState, i: int, t: int) -> tuple[float, float]:
    if (i, t) not in state.x:
        raise ValueError(f"(i={i}, t={t}) outside the computed range i=2..{state.k}, "
                         f"t={state.n - state.stage_count}..{state.n}")
    ct = comb(t, i)
    return float(i * ct * state.x[i, t]), float(ct * state.y[i, t])


def trajectory_csv(state: MeanFieldState) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "i", "predicted_P", "predicted_N"])
    for t in state.stages:
        for i in range(2, state.k + 1):
            P, N = predicted_counts(state, i, t)
            w.writerow([t, i, repr(P), repr(N)])
    return buf.getvalue()
