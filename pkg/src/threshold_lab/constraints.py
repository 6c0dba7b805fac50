"""Clausal constraint sets, their derived statistics, and threshold classification.

A template ``C(a, b)`` is the clause with ``a`` negated and ``b`` positive
literals over distinct variables.  A constraint set is a finite nonempty set
of templates.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable


class ScopeWarning(UserWarning):
    """Input outside the configurations the classification rule was derived for."""


@dataclass(frozen=True, order=True)
class ClauseTemplate:
    negatives: int
    positives: int

    def __post_init__(self):
        if self.negatives < 0 or self.positives < 0:
            raise ValueError(f"template counts must be nonnegative, got {self}")
        if self.negatives + self.positives < 1:
            raise ValueError("C(0,0) is not a clausal constraint")

    @property
    def arity(self) -> int:
        return self.negatives + self.positives

    @property
    def zero_valid(self) -> bool:
        return self.negatives >= 1

    @property
    def one_valid(self) -> bool:
        return self.positives >= 1

    @property
    def horn(self) -> bool:
        return self.positives <= 1

    @property
    def neg_horn(self) -> bool:
        return self.negatives <= 1

    def dual(self) -> "ClauseTemplate":
        return ClauseTemplate(self.positives, self.negatives)

    def __str__(self):
        return f"C({self.negatives},{self.positives})"


def C(a: int, b: int) -> ClauseTemplate:
    return ClauseTemplate(a, b)


@dataclass(frozen=True)
class ConstraintStats:
    k: int
    p: dict[int, int]
    n: dict[int, int]
    delta_k: int
    a0: int
    a_ge1: int
    b0: int
    b_ge1: int

    def as_rows(self) -> list[tuple[str, str]]:
        rows = [("k", str(self.k))]
        rows += [(f"p_{i}", str(v)) for i, v in self.p.items()]
        rows += [(f"n_{i}", str(v)) for i, v in self.n.items()]
        rows += [
            ("delta_k", str(self.delta_k)),
            ("a0", str(self.a0)),
            ("a_ge1", str(self.a_ge1)),
            ("b0", str(self.b0)),
            ("b_ge1", str(self.b_ge1)),
        ]
        return rows


@dataclass(frozen=True)
class ConstraintSet:
    templates: frozenset[ClauseTemplate]
    _stats: ConstraintStats | None = field(default=None, compare=False, repr=False)

    def __init__(self, templates: Iterable[ClauseTemplate | tuple[int, int]]):
        ts = frozenset(t if isinstance(t, ClauseTemplate) else ClauseTemplate(*t) for t in templates)
        if not ts:
            raise ValueError("a constraint set needs at least one template")
        object.__setattr__(self, "templates", ts)
        object.__setattr__(self, "_stats", None)

    def __iter__(self):
        return iter(sorted(self.templates))

    def __len__(self):
        return len(self.templates)

    def __contains__(self, t):
        return t in self.templates

    def __str__(self):
        return "{" + ", ".join(str(t) for t in self) + "}"

    @property
    def k(self) -> int:
        return max(t.arity for t in self.templates)

    @property
    def stats(self) -> ConstraintStats:
        if self._stats is None:
            object.__setattr__(self, "_stats", compute_stats(self))
        return self._stats

    def dual(self) -> "ConstraintSet":
        return ConstraintSet(t.dual() for t in self.templates)


def compute_stats(S: ConstraintSet) -> ConstraintStats:
    k = S.k
    p = {i: int(ClauseTemplate(i - 1, 1) in S) for i in range(1, k + 1)}
    n = {i: int(ClauseTemplate(i, 0) in S) for i in range(1, k + 1)}
    return ConstraintStats(
        k=k,
        p=p,
        n=n,
        delta_k=k * p[k] + n[k],
        a0=max([0] + [t.negatives for t in S.templates if t.positives == 0]),
        a_ge1=max([0] + [t.negatives for t in S.templates if t.positives >= 1]),
        b0=max([0] + [t.positives for t in S.templates if t.negatives == 0]),
        b_ge1=max([0] + [t.positives for t in S.templates if t.negatives >= 1]),
    )


def is_0valid(S: ConstraintSet) -> bool:
    return all(t.zero_valid for t in S.templates)


def is_1valid(S: ConstraintSet) -> bool:
    return all(t.one_valid for t in S.templates)


def is_horn(S: ConstraintSet) -> bool:
    return all(t.horn for t in S.templates)


def is_neg_horn(S: ConstraintSet) -> bool:
    return all(t.neg_horn for t in S.templates)


class ThresholdClass(enum.Enum):
    TRIVIAL = "Trivial"
    COARSE = "Coarse"
    SHARP = "Sharp"

    def __str__(self):
        return self.value


class SchaeferClass(enum.Enum):
    TRIVIAL_P = "TrivialP"
    P = "P"
    NP_COMPLETE = "NPComplete"

    def __str__(self):
        return self.value


class CorollaryCase(enum.Enum):
    HORN = "HornCase"
    NEG_HORN = "NegHornCase"
    ZERO_ENDPOINT = "ZeroEndpointCase"
    ONE_ENDPOINT = "OneEndpointCase"

    def __str__(self):
        return self.value


def threshold_class(S: ConstraintSet) -> ThresholdClass:
    """Classify SAT(S) as trivial, coarse-threshold or sharp-threshold.

    Raises ``ValueError`` for sets of maximum arity below 2.  Emits a
    :class:`ScopeWarning` when the sharp/coarse comparison is reached with
    ``a0 < 2`` or ``b0 < 2``.
    """
    if S.k < 2:
        raise ValueError(f"classification needs maximum arity k >= 2, got k = {S.k} for {S}")
    if is_0valid(S) or is_1valid(S):
        return ThresholdClass.TRIVIAL
    ts = S.templates
    if all(t.horn or t.zero_valid for t in ts) or all(t.neg_horn or t.one_valid for t in ts):
        return ThresholdClass.COARSE
    st = S.stats
    a0, a1, b0, b1 = st.a0, st.a_ge1, st.b0, st.b_ge1
    if a0 < 2 or b0 < 2:
        warnings.warn(
            f"{S}: a0={a0}, b0={b0}; the sharp/coarse rule is applied verbatim outside a0, b0 >= 2",
            ScopeWarning,
            stacklevel=2,
        )
    sharp = (a1 < a0 <= b0) or (b1 < b0 <= a0) or (a0 == b0 == min(a1, b1))
    return ThresholdClass.SHARP if sharp else ThresholdClass.COARSE


def schaefer_class_clausal(S: ConstraintSet) -> SchaeferClass:
    if is_0valid(S) or is_1valid(S):
        return SchaeferClass.TRIVIAL_P
    if is_horn(S) or is_neg_horn(S) or S.k <= 2:
        return SchaeferClass.P
    return SchaeferClass.NP_COMPLETE


def corollary_case(S: ConstraintSet) -> frozenset[CorollaryCase]:
    """Which coarse-threshold explanations apply to ``S``.

    The endpoint cases are flagged for NP-complete sets only.  Random clauses
    of the all-positive template ``C(0, b0)`` are the first to defeat ``0^n``
    when ``b0 <= a0`` (their universe is the larger one), so that side is the
    zero-endpoint case; ``a0 <= b0`` symmetrically gives the one-endpoint case.
    """
    cls = threshold_class(S)
    if cls is not ThresholdClass.COARSE:
        raise ValueError(f"{S} has a {cls} threshold, corollary cases apply to coarse sets only")
    out = set()
    if is_horn(S):
        out.add(CorollaryCase.HORN)
    if is_neg_horn(S):
        out.add(CorollaryCase.NEG_HORN)
    if schaefer_class_clausal(S) is SchaeferClass.NP_COMPLETE:
        st = S.stats
        if ClauseTemplate(0, st.b0) in S and st.b0 <= st.a0:
            out.add(CorollaryCase.ZERO_ENDPOINT)
        if ClauseTemplate(st.a0, 0) in S and st.a0 <= st.b0:
            out.add(CorollaryCase.ONE_ENDPOINT)
    return frozenset(out)


# -- file format --------------------------------------------------------------

def parse_constraint_set(text: str) -> ConstraintSet:
    templates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'a b', got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer template {raw!r}") from None
        templates.append(ClauseTemplate(a, b))
    return ConstraintSet(templates)


def load_constraint_set(path: str | Path) -> ConstraintSet:
    return parse_constraint_set(Path(path).read_text())


def format_constraint_set(S: ConstraintSet) -> str:
    return "".join(f"{t.negatives} {t.positives}\n" for t in S)


# Named sets used throughout the experiments.
CLAUSAL_2SAT = ConstraintSet([C(2, 0), C(1, 1), C(0, 2)])
CLAUSAL_3SAT = ConstraintSet([C(3, 0), C(2, 1), C(1, 2), C(0, 3)])
HORN_2 = ConstraintSet([C(0, 1), C(1, 0), C(1, 1), C(2, 0)])
COARSE_NPC = ConstraintSet([C(2, 0), C(0, 3), C(2, 2)])
