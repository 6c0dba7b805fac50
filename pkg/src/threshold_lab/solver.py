"""Positive unit resolution (PUR), satisfiability oracles and the endpoint predictor."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .formula import Formula, satisfies

ORACLE_MAX_VARS = 30


class Outcome(enum.Enum):
    ACCEPT = "Accept"
    REJECT = "Reject"

    def __str__(self):
        return self.value


class Prediction(enum.Enum):
    SAT = "PredictSat"
    UNSAT = "PredictUnsat"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StageRecord:
    t: int
    P: tuple[int, ...]  # P[i]: live size-i clauses with exactly one positive literal
    N: tuple[int, ...]  # N[i]: live size-i clauses with no positive literal
    other: tuple[int, ...]  # live size-i clauses with two or more positive literals

    @property
    def live(self) -> int:
        return sum(self.P) + sum(self.N) + sum(self.other)


@dataclass(frozen=True)
class PurTrace:
    stages: tuple[StageRecord, ...]
    outcome: Outcome
    halt_stage: int

    def at(self, t: int) -> StageRecord | None:
        first = self.stages[0].t if self.stages else None
        if first is None or not 0 <= first - t < len(self.stages):
            return None
        return self.stages[first - t]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "i", "P_i", "N_i"])
        for s in self.stages:
            for i in range(1, len(s.P)):
                w.writerow([s.t, i, s.P[i], s.N[i]])
        return buf.getvalue()


@dataclass(frozen=True)
class PurResult:
    outcome: Outcome
    trace: PurTrace | None
    assigned: int  # variables set to 1 before halting
    order: tuple[int, ...] = ()  # those variables, in assignment order

    @property
    def accepted(self) -> bool:
        return self.outcome is Outcome.ACCEPT


def _occurrence_index(F: Formula):
    n, lits = F.n, F.lits
    m, w = lits.shape
    flat = lits.ravel()
    cid = np.repeat(np.arange(m, dtype=np.int64), w)
    keep = flat != 0
    code = flat[keep] + np.int32(n)
    cid = cid[keep]
    order = np.argsort(code, kind="stable")
    starts = np.zeros(2 * n + 2, np.int64)
    np.cumsum(np.bincount(code, minlength=2 * n + 1), out=starts[1:])
    return cid[order], starts


class _Occurrences:
    """Clause ids containing a literal; scans until a full index pays off."""

    SCAN_LIMIT = 80

    def __init__(self, F: Formula):
        self.F = F
        self.calls = 0
        self.by_code = None
        self.cols = None

    def clauses(self, lit: int) -> list[int]:
        self.calls += 1
        if self.by_code is None:
            if self.calls <= self.SCAN_LIMIT:
                if self.cols is None:
                    self.cols = [np.ascontiguousarray(col) for col in self.F.lits.T]
                hits = [np.flatnonzero(col == lit) for col in self.cols]
                # a clause holds each variable at most once, so no duplicates
                return np.sort(np.concatenate(hits)).tolist()
            self.by_code, starts = _occurrence_index(self.F)
            self.starts = starts.tolist()
        code = lit + self.F.n
        return self.by_code[self.starts[code] : self.starts[code + 1]].tolist()


def pur(F: Formula, trace: bool = False, rng: np.random.Generator | None = None,
        trace_limit: int | None = None) -> PurResult:
    """Run positive unit resolution on ``F``.

    While a positive unit clause exists, pick one uniformly at random among
    the live ones; reject if the complementary negative unit clause is
    present, otherwise set the variable to 1 and simplify.  Accept when no
    positive unit clause is left.
    """
    n, lits = F.n, F.lits
    m, w = lits.shape
    rng = rng if rng is not None else np.random.default_rng(0)

    npos_a = (lits > 0).sum(axis=1)
    nneg_a = (lits < 0).sum(axis=1)
    length0 = npos_a + nneg_a
    npos = npos_a
    nneg = nneg_a.copy()
    alive = np.ones(m, bool)

    negunit = [0] * (n + 1)
    for c in np.flatnonzero((length0 == 1) & (npos_a == 0)).tolist():
        negunit[-int(lits[c].min())] += 1
    punits = np.flatnonzero((length0 == 1) & (npos_a == 1)).tolist()
    if m and (length0 == 0).any():
        return PurResult(Outcome.REJECT, PurTrace((), Outcome.REJECT, n) if trace else None, 0)

    width = max(w, 1) + 1
    if trace:
        Pc = np.bincount(length0[npos_a == 1], minlength=width)[:width].tolist()
        Nc = np.bincount(length0[npos_a == 0], minlength=width)[:width].tolist()
        Oc = np.bincount(length0[npos_a >= 2], minlength=width)[:width].tolist()
        stages: list[StageRecord] = []

    occ = _Occurrences(F)
    assigned = [False] * (n + 1)
    order: list[int] = []

    t = n
    done = 0
    uniforms = rng.random(64)
    ui = 0

    def finish(outcome):
        tr = PurTrace(tuple(stages), outcome, t) if trace else None
        return PurResult(outcome, tr, done, tuple(order))

    while True:
        # drop dead entries lazily; a random probe among live ones is uniform
        while punits:
            if ui == len(uniforms):
                uniforms = rng.random(64)
                ui = 0
            j = int(uniforms[ui] * len(punits))
            ui += 1
            c = punits[j]
            punits[j] = punits[-1]
            punits.pop()
            if alive[c]:
                break
        else:
            c = -1
        if trace and (trace_limit is None or len(stages) < trace_limit):
            stages.append(StageRecord(t, tuple(Pc), tuple(Nc), tuple(Oc)))
        if c < 0:
            return finish(Outcome.ACCEPT)
        # the lone positive literal of a one-positive clause never changes
        x = int(lits[c].max())
        if negunit[x]:
            return finish(Outcome.REJECT)

        assigned[x] = True
        order.append(x)
        done += 1
        t -= 1
        for c2 in occ.clauses(x):
            if alive[c2]:
                alive[c2] = False
                if trace:
                    ln = int(npos[c2] + nneg[c2])
                    if npos[c2] == 1:
                        Pc[ln] -= 1
                    else:
                        Oc[ln] -= 1
        for c2 in occ.clauses(-x):
            if not alive[c2]:
                continue
            p2 = int(npos[c2])
            ln = p2 + int(nneg[c2])
            nneg[c2] -= 1
            if trace:
                if p2 == 1:
                    Pc[ln] -= 1
                    Pc[ln - 1] += 1
                elif p2 == 0:
                    Nc[ln] -= 1
                    Nc[ln - 1] += 1
                else:
                    Oc[ln] -= 1
                    Oc[ln - 1] += 1
            if ln == 2:
                if p2 == 1:
                    punits.append(c2)
                elif p2 == 0:
                    for y in lits[c2].tolist():
                        if y < 0 and not assigned[-y]:
                            negunit[-y] += 1
                            break
            elif ln == 1:
                # unreachable: a negative unit on x rejects before x is set
                return finish(Outcome.REJECT)


# -- exact oracles ----------------------------------------------------------------

def _simplify(clauses, lit):
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = [y for y in c if y != -lit]
            if not c:
                return None
        out.append(c)
    return out


def _dpll(clauses) -> bool:
    while True:
        if not clauses:
            return True
        unit = next((c[0] for c in clauses if len(c) == 1), None)
        if unit is None:
            break
        clauses = _simplify(clauses, unit)
        if clauses is None:
            return False
    shortest = min(len(c) for c in clauses)
    counts: dict[int, int] = {}
    for c in clauses:
        if len(c) == shortest:
            for y in c:
                counts[y] = counts.get(y, 0) + 1
    lit = max(counts, key=lambda y: (counts[y], -abs(y), y))
    for choice in (lit, -lit):
        sub = _simplify(clauses, choice)
        if sub is not None and _dpll(sub):
            return True
    return False


def oracle_sat(F: Formula) -> bool:
    """Exact satisfiability by exhaustive search with unit propagation (n <= 30)."""
    if F.n > ORACLE_MAX_VARS:
        raise ValueError(f"oracle is limited to n <= {ORACLE_MAX_VARS}, got n = {F.n}")
    return _dpll([list(c) for c in F.clauses])


def cdcl_sat(F: Formula) -> bool:
    """Exact satisfiability via MiniSat, for instances beyond the oracle's range."""
    from pysat.solvers import Minisat22

    with Minisat22() as s:
        for row in F.lits.tolist():
            s.add_clause([x for x in row if x])
        return bool(s.solve())


def endpoint_predictor(F: Formula) -> Prediction:
    zeros = np.zeros(F.n, bool)
    if satisfies(F, zeros) or satisfies(F, ~zeros):
        return Prediction.SAT
    return Prediction.UNSAT


def write_trace_csv(tr: PurTrace, path: str | Path):
    Path(path).write_text(tr.to_csv())
