"""Formulas over clausal templates and the two random formula models.

A formula is stored as an ``(m, w)`` int32 array of DIMACS literals, one
clause per row, sorted by variable and right-padded with zeros.  ``w`` is the
widest clause the formula may hold.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .constraints import ClauseTemplate, ConstraintSet

# universes up to this size are listed explicitly instead of rejection-sampled
ENUMERATE_LIMIT = 200_000


@dataclass(frozen=True, eq=False)
class Formula:
    n: int
    lits: np.ndarray

    def __post_init__(self):
        lits = np.asarray(self.lits, dtype=np.int32)
        if lits.ndim != 2:
            lits = lits.reshape(len(lits), -1) if lits.size else np.zeros((0, 1), np.int32)
        lits.setflags(write=False)
        object.__setattr__(self, "lits", lits)

    @classmethod
    def from_clauses(cls, n: int, clauses: Iterable[Iterable[int]]) -> "Formula":
        rows = [sorted(set(c), key=abs) for c in clauses]
        for row in rows:
            if not row:
                raise ValueError("empty clause")
            vs = [abs(x) for x in row]
            if len(set(vs)) != len(vs):
                raise ValueError(f"clause {row} repeats a variable")
            if min(vs) < 1 or max(vs) > n:
                raise ValueError(f"clause {row} uses a variable outside 1..{n}")
        w = max([len(r) for r in rows], default=1)
        arr = np.zeros((len(rows), w), np.int32)
        for i, r in enumerate(rows):
            arr[i, : len(r)] = r
        return cls(n, arr)

    def __len__(self):
        return self.lits.shape[0]

    @property
    def m(self) -> int:
        return self.lits.shape[0]

    @property
    def clauses(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in row if x) for row in self.lits]

    def __eq__(self, other):
        if not isinstance(other, Formula):
            return NotImplemented
        return self.n == other.n and self.clauses == other.clauses

    def __getitem__(self, sl: slice) -> "Formula":
        return Formula(self.n, self.lits[sl])

    def template_counts(self) -> dict[ClauseTemplate, int]:
        neg = (self.lits < 0).sum(axis=1)
        pos = (self.lits > 0).sum(axis=1)
        out: dict[ClauseTemplate, int] = {}
        for a, b in zip(neg.tolist(), pos.tolist()):
            t = ClauseTemplate(a, b)
            out[t] = out.get(t, 0) + 1
        return out


def template_of(clause: Sequence[int]) -> ClauseTemplate:
    return ClauseTemplate(sum(1 for x in clause if x < 0), sum(1 for x in clause if x > 0))


# -- the clause universe -------------------------------------------------------

def template_universe_size(t: ClauseTemplate, n: int) -> int:
    return math.comb(n, t.arity) * math.comb(t.arity, t.negatives)


def universe_size(S: ConstraintSet, n: int) -> int:
    """Number of distinct instantiations of templates of ``S`` over ``n`` variables."""
    if n < S.k:
        raise ValueError(f"n = {n} is smaller than the maximum arity {S.k}")
    return sum(template_universe_size(t, n) for t in S)


@functools.lru_cache(maxsize=32)
def enumerate_universe(S: ConstraintSet, n: int) -> Formula:
    if n < S.k:
        raise ValueError(f"n = {n} is smaller than the maximum arity {S.k}")
    rows = []
    for t in S:
        for vs in combinations(range(1, n + 1), t.arity):
            for negs in combinations(vs, t.negatives):
                ns = set(negs)
                rows.append([-v if v in ns else v for v in vs])
    w = S.k
    arr = np.zeros((len(rows), w), np.int32)
    for i, r in enumerate(rows):
        arr[i, : len(r)] = r
    return Formula(n, arr)


def _canonical(rows: np.ndarray) -> np.ndarray:
    """Sort each row by variable, zeros last."""
    key = np.where(rows == 0, np.iinfo(np.int32).max, np.abs(rows))
    order = np.argsort(key, axis=1, kind="stable")
    return np.take_along_axis(rows, order, axis=1)


def _distinct_tuples(n: int, r: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` uniform ordered r-tuples of distinct variables in 1..n."""
    out = rng.integers(1, n + 1, size=(count, r), dtype=np.int64)
    if r < 2:
        return out
    while True:
        s = np.sort(out, axis=1)
        bad = np.flatnonzero((s[:, 1:] == s[:, :-1]).any(axis=1))
        if bad.size == 0:
            return out
        out[bad] = rng.integers(1, n + 1, size=(bad.size, r), dtype=np.int64)


def sample_template(t: ClauseTemplate, n: int, count: int, width: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent uniform clauses from the universe of template ``t``."""
    vs = _distinct_tuples(n, t.arity, count, rng)
    vs[:, : t.negatives] *= -1
    out = np.zeros((count, width), np.int32)
    out[:, : t.arity] = vs
    return _canonical(out)


def _template_probs(S: ConstraintSet, n: int) -> tuple[list[ClauseTemplate], np.ndarray]:
    ts = list(S)
    sizes = [template_universe_size(t, n) for t in ts]
    total = sum(sizes)
    return ts, np.array([s / total for s in sizes])


def _iid_clauses(S: ConstraintSet, n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    ts, probs = _template_probs(S, n)
    which = rng.choice(len(ts), size=m, p=probs) if len(ts) > 1 else np.zeros(m, np.intp)
    out = np.zeros((m, S.k), np.int32)
    for j, t in enumerate(ts):
        rows = np.flatnonzero(which == j)
        if rows.size:
            out[rows] = sample_template(t, n, rows.size, S.k, rng)
    return out


def sample_multiset(S: ConstraintSet, n: int, m: int, rng: np.random.Generator) -> Formula:
    """``m`` clauses drawn uniformly with repetition from the clause universe."""
    if universe_size(S, n) == 0:
        raise ValueError("empty clause universe")
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    return Formula(n, _iid_clauses(S, n, m, rng))


def _row_keys(rows: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows)
    return rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()


def _distinct_from_template(t: ClauseTemplate, n: int, count: int, width: int, rng) -> np.ndarray:
    """A uniform ``count``-subset of the universe of ``t``, in random order."""
    have = np.zeros((0, width), np.int32)
    while len(have) < count:
        need = count - len(have)
        fresh = sample_template(t, n, need + need // 8 + 8, width, rng)
        both = np.concatenate([have, fresh])
        _, first = np.unique(_row_keys(both), return_index=True)
        have = both[np.sort(first)][:count]
    return have


def sample_const_prob(S: ConstraintSet, n: int, p: float, rng: np.random.Generator) -> Formula:
    """Each universe clause kept independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    U = universe_size(S, n)
    if U <= ENUMERATE_LIMIT:
        full = enumerate_universe(S, n)
        keep = rng.random(U) < p
        return Formula(n, full.lits[keep])
    parts = []
    for t in S:
        size = template_universe_size(t, n)
        count = int(rng.binomial(size, p))
        if count > size // 2:
            raise ValueError(f"p = {p} keeps {count} of {size} clauses; too dense to sample at n = {n}")
        parts.append(_distinct_from_template(t, n, count, S.k, rng))
    return Formula(n, np.concatenate(parts) if parts else np.zeros((0, S.k), np.int32))


class ClauseStream:
    """Random clause sequence whose prefixes are random formulas.

    With ``distinct=True`` the sequence is a uniformly random ordering of the
    clause universe, so the first ``L`` clauses are a uniform ``L``-subset; with
    ``distinct=False`` it is an i.i.d. sequence, so prefixes are multiset-model
    samples.  Prefixes of one stream are coupled: the formula only grows.
    """

    def __init__(self, S: ConstraintSet, n: int, rng: np.random.Generator, distinct: bool = True):
        self.S, self.n, self.rng, self.distinct = S, n, rng, distinct
        self.universe = universe_size(S, n)
        self._rows = np.zeros((0, S.k), np.int32)
        self._full = None
        if distinct and self.universe <= ENUMERATE_LIMIT:
            full = enumerate_universe(S, n).lits
            self._full = full[rng.permutation(len(full))]

    @property
    def max_length(self) -> float:
        return self.universe if self.distinct else math.inf

    def take(self, length: int) -> Formula:
        if self.distinct and length > self.universe:
            raise ValueError(f"only {self.universe} distinct clauses exist")
        if self._full is not None:
            return Formula(self.n, self._full[:length])
        while len(self._rows) < length:
            need = max(length - len(self._rows), len(self._rows) // 2, 64)
            fresh = _iid_clauses(self.S, self.n, need, self.rng)
            if self.distinct:
                both = np.concatenate([self._rows, fresh])
                _, first = np.unique(_row_keys(both), return_index=True)
                self._rows = both[np.sort(first)]
            else:
                self._rows = np.concatenate([self._rows, fresh])
        return Formula(self.n, self._rows[:length])


# -- evaluation and transforms ---------------------------------------------------

def satisfies(F: Formula, assignment: Sequence[int] | np.ndarray) -> bool:
    A = np.asarray(assignment, dtype=bool)
    if A.shape != (F.n,):
        raise ValueError(f"assignment has length {A.size}, formula has {F.n} variables")
    if F.m == 0:
        return True
    lits = F.lits
    vals = A[np.abs(lits) - 1]
    true_lit = ((lits > 0) & vals) | ((lits < 0) & ~vals)
    return bool(true_lit.any(axis=1).all())


class DeletionMode(enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"


def _delete_from_clause(clause: list[int], b0: int, mode: DeletionMode, rng) -> list[int]:
    pos = [x for x in clause if x > 0]
    neg = [x for x in clause if x < 0]
    budget = b0 - 1
    if len(pos) >= b0:
        keep = pos[int(rng.integers(len(pos)))]
        return sorted(neg + [keep], key=abs)
    if mode is DeletionMode.CASE1 or not pos:
        kept_pos = []
    else:
        kept_pos = [pos[int(rng.integers(len(pos)))]]
    budget -= len(pos) - len(kept_pos)
    order = rng.permutation(len(neg))
    kept_neg = [neg[i] for i in sorted(order[budget:])]
    return sorted(kept_pos + kept_neg, key=abs)


def deletion_transform(F: Formula, b0: int, mode: DeletionMode | str, rng: np.random.Generator) -> Formula:
    """Shorten every clause by ``b0 - 1`` literals, steering the result towards Horn.

    Clauses with fewer than ``b0`` positive literals lose all of them (CASE1)
    or all but one (CASE2), then random negative literals make up the rest of
    the ``b0 - 1`` deletions.  Clauses with at least ``b0`` positive literals
    keep exactly one positive literal, chosen uniformly, and all negatives.
    """
    mode = DeletionMode(mode)
    if b0 < 1:
        raise ValueError(f"b0 must be positive, got {b0}")
    out = []
    for clause in F.clauses:
        if len(clause) < b0:
            raise ValueError(f"clause {clause} is shorter than b0 = {b0}")
        out.append(_delete_from_clause(list(clause), b0, mode, rng))
    if not out:
        return Formula(F.n, np.zeros((0, 1), np.int32))
    return Formula.from_clauses(F.n, out)


# -- DIMACS ----------------------------------------------------------------------

def to_dimacs(F: Formula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {F.n} {F.m}")
    lines += [" ".join(str(x) for x in c) + " 0" for c in F.clauses]
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> Formula:
    n = m = None
    clauses: list[list[int]] = []
    cur: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line {raw!r}")
            n, m = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(x)
    if cur:
        clauses.append(cur)
    if n is None:
        raise ValueError("missing 'p cnf' header")
    if m != len(clauses):
        raise ValueError(f"header declares {m} clauses, found {len(clauses)}")
    if not clauses:
        return Formula(n, np.zeros((0, 1), np.int32))
    return Formula.from_clauses(n, clauses)


def write_dimacs(F: Formula, path: str | Path, comments: Sequence[str] = ()):
    Path(path).write_text(to_dimacs(F, comments))


def read_dimacs(path: str | Path) -> Formula:
    return from_dimacs(Path(path).read_text())
