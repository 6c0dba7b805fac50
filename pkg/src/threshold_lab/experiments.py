"""Monte Carlo experiments on random SAT(S) formulas.

Every routine takes a master ``seed`` and addresses its random streams by
index (control point, trial), so outputs are reproducible and independent
of ``jobs``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .constraints import (
    ConstraintSet,
    is_horn,
)
from .formula import (
    ClauseStream,
    Formula,
    sample_const_prob,
    sample_multiset,
    satisfies,
    universe_size,
)
from .queueing import poly_p_rate, qempty_fixed_rate, qempty_mc, simulate_emptied
from .seeding import derive_seed, parallel_map, rng_for
from .solver import ORACLE_MAX_VARS, Prediction, cdcl_sat, endpoint_predictor, oracle_sat, pur
from .stats import bootstrap_interval, wilson_interval

# stream tags, kept distinct from trial indices
_BOOT = 2**40 + 1
_SEEDED = 2**40 + 2
_BETA = 2**40 + 3


class Decider(enum.Enum):
    ORACLE = "oracle"
    PUR = "pur"
    CDCL = "cdcl"


class Model(enum.Enum):
    MULTISET = "multiset"
    CONST_PROB = "const"


class NonMonotoneError(RuntimeError):
    """Probability estimates increase with the control beyond their confidence intervals."""


# a synthetic decider draws its own verdict from (control, rng), no formula involved
SyntheticDecider = Callable[[float, np.random.Generator], bool]


def check_decider(S: ConstraintSet, n: int, decider, allow_pur_accepts: bool = False) -> str:
    """Validate a decider for ``S`` at size ``n``; returns the measured quantity's label."""
    if callable(decider) and not isinstance(decider, Decider):
        return "synthetic"
    decider = Decider(decider)
    if decider is Decider.ORACLE and n > ORACLE_MAX_VARS:
        raise ValueError(f"the exhaustive oracle handles n <= {ORACLE_MAX_VARS}; use the cdcl decider for n = {n}")
    if decider is Decider.PUR and not is_horn(S):
        if not allow_pur_accepts:
            raise ValueError(f"PUR decides satisfiability only for Horn sets and {S} is not Horn; "
                             "pass allow_pur_accepts to measure Pr[PUR accepts] instead")
        return "pur_accepts"
    return "satisfiable"


def decide(F: Formula, decider: Decider, rng: np.random.Generator) -> bool:
    if decider is Decider.ORACLE:
        return oracle_sat(F)
    if decider is Decider.CDCL:
        return cdcl_sat(F)
    return pur(F, rng=rng).accepted


def clauses_for_density(S: ConstraintSet, n: int, density: float) -> int:
    return int(round(density * n ** (S.k - 1)))


def sample_formula(S: ConstraintSet, n: int, control: float, model: Model, rng) -> Formula:
    if model is Model.CONST_PROB:
        return sample_const_prob(S, n, control, rng)
    return sample_multiset(S, n, clauses_for_density(S, n, control), rng)


# -- probability curves ------------------------------------------------------------

@dataclass(frozen=True)
class CurvePoint:
    control: float
    estimate: float
    ci95: tuple[float, float]
    trials: int
    model: str = "const"
    metric: str = "satisfiable"


def _count_block(args) -> int:
    S, n, control, model, decider, seed, start, size = args
    hits = 0
    for j in range(start, start + size):
        rng = np.random.default_rng(derive_seed(seed, j))
        if isinstance(decider, Decider):
            F = sample_formula(S, n, control, model, rng)
            hits += decide(F, decider, rng)
        else:
            hits += bool(decider(control, rng))
    return hits


def _count(S, n, control, model, decider, trials, seed, jobs, block=250) -> int:
    work = [(S, n, control, model, decider, seed, s, min(block, trials - s)) for s in range(0, trials, block)]
    return sum(parallel_map(_count_block, work, jobs))


def sat_curve(S: ConstraintSet, n: int, controls: Sequence[float], trials: int,
              decider=Decider.ORACLE, model=Model.CONST_PROB, seed: int = 0,
              jobs: int | None = 1, allow_pur_accepts: bool = False) -> list[CurvePoint]:
    """Estimate Pr[satisfiable] (or Pr[PUR accepts]) at each control value.

    Controls are probabilities ``p`` for the constant-probability model and
    clause densities ``m / n^(k-1)`` for the multiset model.
    """
    model = Model(model)
    if not callable(decider) or isinstance(decider, Decider):
        decider = Decider(decider)
    metric = check_decider(S, n, decider, allow_pur_accepts)
    out = []
    for ci, control in enumerate(controls):
        hits = _count(S, n, control, model, decider, trials, derive_seed(seed, ci), jobs)
        out.append(CurvePoint(float(control), hits / trials, wilson_interval(hits, trials), trials,
                              model.value, metric))
    return out


# -- threshold location ---------------------------------------------------------------

@dataclass(frozen=True)
class LevelLocation:
    level: float
    control: float
    bracket: tuple[float, float]
    probes: int


@dataclass(frozen=True)
class WidthReport:
    n: int
    epsilon: float
    p_eps: float  # control where Pr[sat] = epsilon (the largest of the three)
    p_half: float
    p_one_minus_eps: float  # control where Pr[sat] = 1 - epsilon
    width_ratio: float
    ratio_ci: tuple[float, float]
    method: str
    trials: int


def bisect_level(estimate: Callable[[float, int, int], int], target: float, lo: float, hi: float,
                 trials: int, seed: int, rel_tol: float = 0.01, max_trials: int = 20_000,
                 max_probes: int = 200) -> LevelLocation:
    """Find where a decreasing probability curve crosses ``target``.

    ``estimate(control, trials, seed)`` returns a success count.  A probe
    whose Wilson interval contains the target is repeated with doubled trials
    up to ``max_trials``; if it still straddles, the probe is accepted.
    """
    probes: list[tuple[float, tuple[float, float]]] = []

    def side(p: float) -> int:
        T = trials
        while True:
            hits = estimate(p, T, derive_seed(seed, len(probes)))
            ci = wilson_interval(hits, T)
            for q, qci in probes:
                if (q < p and qci[1] < ci[0]) or (q > p and ci[1] < qci[0]):
                    raise NonMonotoneError(
                        f"estimate at {p:g} has CI {ci} but at {q:g} it is {qci}; the curve is not decreasing")
            probes.append((p, ci))
            if len(probes) > max_probes:
                raise RuntimeError(f"bisection exceeded {max_probes} probes")
            if ci[0] > target:
                return 1
            if ci[1] < target:
                return -1
            if T >= max_trials:
                return 0
            T = min(2 * T, max_trials)

    if lo > 0:
        while (s := side(lo)) == -1:
            hi, lo = lo, lo / 2
        if s == 0:
            return LevelLocation(target, lo, (lo, lo), len(probes))
    while (s := side(hi)) == 1:
        if hi >= 1.0 and hi == min(hi * 2, 1.0):
            raise ValueError(f"probability stays above {target} on the whole bracket")
        lo, hi = hi, min(hi * 2, 1.0) if hi < 1 else hi * 2
    if s == 0:
        return LevelLocation(target, hi, (hi, hi), len(probes))
    while True:
        mid = math.sqrt(lo * hi) if lo > 0 else (lo + hi) / 2
        if hi - lo <= rel_tol * mid:
            return LevelLocation(target, mid, (lo, hi), len(probes))
        s = side(mid)
        if s == 1:
            lo = mid
        elif s == -1:
            hi = mid
        else:
            return LevelLocation(target, mid, (lo, hi), len(probes))


def _critical_value(args) -> float:
    """Smallest control at which one coupled formula sequence turns unsatisfiable."""
    S, n, model, decider, seed, j = args
    rng = np.random.default_rng(derive_seed(seed, j))
    stream = ClauseStream(S, n, rng, distinct=model is Model.CONST_PROB)
    cap = stream.max_length

    def sat(L):
        return L == 0 or decide(stream.take(L), decider, rng)

    lo, hi = 0, 8
    while True:
        hi = min(hi, cap)
        if not sat(hi):
            break
        if hi == cap:
            return math.inf
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if sat(mid):
            lo = mid
        else:
            hi = mid
    if model is Model.CONST_PROB:
        # the hi-th smallest of U independent uniform keys, independent of the order
        beta_rng = np.random.default_rng(derive_seed(derive_seed(seed, j), _BETA))
        return float(beta_rng.beta(hi, stream.universe - hi + 1))
    return hi / n ** (S.k - 1)


def critical_values(S: ConstraintSet, n: int, trials: int, decider=Decider.CDCL, model=Model.CONST_PROB,
                    seed: int = 0, jobs: int | None = 1) -> np.ndarray:
    """Per-trial critical controls of coupled formula sequences.

    Trial j's formulas at all controls are nested, so Pr[sat at x] is the
    fraction of critical values above x.
    """
    model, decider = Model(model), Decider(decider)
    check_decider(S, n, decider)
    work = [(S, n, model, decider, seed, j) for j in range(trials)]
    return np.array(parallel_map(_critical_value, work, jobs))


def _levels_from_critical(crit: np.ndarray, epsilon: float) -> np.ndarray:
    # Pr[sat at x] = Pr[crit > x]; level L is reached at the (1 - L) quantile
    qs = [1 - epsilon, 0.5, epsilon]
    return np.quantile(crit, qs, axis=-1)


def _ratio(levels: np.ndarray) -> np.ndarray:
    p_eps, p_half, p_1me = levels
    with np.errstate(invalid="ignore", divide="ignore"):
        return (p_eps - p_1me) / p_half


def threshold_points(S: ConstraintSet, n: int, epsilon: float, decider=Decider.CDCL, trials: int = 1000,
                     seed: int = 0, model=Model.CONST_PROB, method: str = "coupled",
                     bracket: tuple[float, float] = (0.0, 1.0), jobs: int | None = 1,
                     max_trials: int = 20_000) -> WidthReport:
    """Locate the epsilon, 1/2 and 1-epsilon crossings of Pr[sat] and their relative spread.

    ``method="bisect"`` runs an independent bisection per level on fresh Monte
    Carlo estimates; the ratio interval is the interval-arithmetic image of
    the final brackets.  ``method="coupled"`` computes one critical control per
    trial from nested formula sequences and reads all three levels off the
    empirical quantiles, with a bootstrap interval for the ratio.  Synthetic
    callable deciders require ``bisect``.
    """
    if not 0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    model = Model(model)
    synthetic = callable(decider) and not isinstance(decider, Decider)
    if method == "coupled":
        if synthetic:
            raise ValueError("the coupled method needs a formula decider")
        crit = critical_values(S, n, trials, decider, model, seed, jobs)
        levels = _levels_from_critical(crit, epsilon)
        ratio = float(_ratio(levels))
        boot_rng = rng_for(seed, _BOOT)
        ci = bootstrap_interval(crit, lambda s: _ratio(_levels_from_critical(s, epsilon)), boot_rng)
        return WidthReport(n, epsilon, float(levels[0]), float(levels[1]), float(levels[2]), ratio, ci,
                           "coupled", trials)
    if method != "bisect":
        raise ValueError(f"unknown method {method!r}")
    if not synthetic:
        decider = Decider(decider)
        check_decider(S, n, decider)

    def estimate(control, T, s):
        return _count(S, n, control, model, decider, T, s, jobs)

    locs = [bisect_level(estimate, target, bracket[0], bracket[1], trials, derive_seed(seed, i),
                         max_trials=max_trials)
            for i, target in enumerate((epsilon, 0.5, 1 - epsilon))]
    e, h, o = locs
    ratio = (e.control - o.control) / h.control
    lo = max(0.0, e.bracket[0] - o.bracket[1]) / h.bracket[1]
    hi = (e.bracket[1] - o.bracket[0]) / h.bracket[0] if h.bracket[0] > 0 else math.inf
    return WidthReport(n, epsilon, e.control, h.control, o.control, ratio, (min(lo, ratio), max(hi, ratio)),
                       "bisect", trials)


class Trend(enum.Enum):
    SHARP = "SharpTrend"
    COARSE = "CoarseTrend"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TrendResult:
    verdict: Trend
    reports: tuple[WidthReport, ...]


def trend_verdict(reports: Sequence[WidthReport]) -> Trend:
    """Sharp if every step of n shrinks the ratio with disjoint intervals; coarse if the
    ratio keeps at least half its first value and no pair of sizes shows a
    separated decrease."""
    r = list(reports)
    if all(b.ratio_ci[1] < a.ratio_ci[0] for a, b in zip(r, r[1:])):
        return Trend.SHARP
    separated = any(r[j].ratio_ci[1] < r[i].ratio_ci[0] for i in range(len(r)) for j in range(i + 1, len(r)))
    if r[-1].width_ratio >= 0.5 * r[0].width_ratio and not separated:
        return Trend.COARSE
    return Trend.INCONCLUSIVE


def sharpness_trend(S: ConstraintSet, n_list: Sequence[int], epsilon: float, decider=Decider.CDCL,
                    trials: int = 1000, seed: int = 0, model=Model.CONST_PROB, method: str = "coupled",
                    jobs: int | None = 1, **kw) -> TrendResult:
    n_list = list(n_list)
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError(f"need at least three increasing sizes, got {n_list}")
    reports = tuple(threshold_points(S, n, epsilon, decider, trials, derive_seed(seed, i), model, method,
                                     jobs=jobs, **kw)
                    for i, n in enumerate(n_list))
    return TrendResult(trend_verdict(reports), reports)


# -- limit formulas for PUR acceptance -------------------------------------------------------------

class Case(enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"


def check_case_hypothesis(case: Case, S: ConstraintSet):
    st = S.stats
    big_p = [j for j in range(2, st.k + 1) if st.p[j]]
    big_n = [j for j in range(2, st.k + 1) if st.n[j]]
    case = Case(case)
    if case is Case.CASE1 and not (big_p and big_n):
        raise ValueError(f"Case1 needs p_j1 = n_j2 = 1 for some j1, j2 >= 2; {S} has p-indices {big_p}, "
                         f"n-indices {big_n}")
    if case is Case.CASE2 and not (big_p and not big_n):
        raise ValueError(f"Case2 needs some p_j = 1 (j >= 2) and n_j = 0 for all j >= 2; {S} has "
                         f"p-indices {big_p}, n-indices {big_n}")
    if case is Case.CASE3 and not (big_n and not big_p):
        raise ValueError(f"Case3 needs some n_j = 1 (j >= 2) and p_j = 0 for all j >= 2; {S} has "
                         f"p-indices {big_p}, n-indices {big_n}")


def case_clause_count(case: Case, S: ConstraintSet, c: float, n: int) -> int:
    k = S.k
    exponent = k - 1 + (1 / (k + 1) if Case(case) is Case.CASE3 else 0)
    return int(round(c * n ** exponent))


@dataclass(frozen=True)
class CaseReport:
    case: str
    constraints: str
    c: float
    n: int
    m: int
    trials: int
    empirical: float
    ci95: tuple[float, float]
    predicted: float  # with a single initial customer
    predicted_seeded: float | None  # queue seeded with each formula's positive unit count
    mean_initial_positive_units: float
    mean_initial_negative_units: float
    deviation: float = field(init=False)
    deviation_seeded: float | None = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "deviation", self.empirical - self.predicted)
        object.__setattr__(self, "deviation_seeded",
                           None if self.predicted_seeded is None else self.empirical - self.predicted_seeded)


def _case_block(args):
    S, n, m, seed, start, size = args
    out = []
    for j in range(start, start + size):
        rng = np.random.default_rng(derive_seed(seed, j))
        F = sample_multiset(S, n, m, rng)
        units = F.lits[:, 1] == 0 if F.lits.shape[1] > 1 else np.ones(F.m, bool)
        p1 = int((units & (F.lits[:, 0] > 0)).sum())
        n1 = int((units & (F.lits[:, 0] < 0)).sum())
        out.append((pur(F, rng=rng).accepted, p1, n1))
    return out


def case_prediction(case: Case, S: ConstraintSet, c: float, horizon: int = 10_000, seed: int = 0,
                    qempty_trials: int = 100_000) -> float:
    case = Case(case)
    st = S.stats
    k = st.k
    if case is Case.CASE3:
        return math.exp(-(c ** (k + 1)) * math.factorial(k) ** k)
    rate = poly_p_rate(c, S)
    if rate.constant is not None:
        q = qempty_fixed_rate(rate.constant)
    else:
        q = qempty_mc(rate, qempty_trials, horizon, 1, seed).estimate
    if case is Case.CASE1:
        return q
    lam = c * math.factorial(k) / st.delta_k
    return math.exp(-lam) + (1 - math.exp(-lam)) * q


def case_theorem_check(case: Case, S: ConstraintSet, c: float, n: int, trials: int, seed: int = 0,
                       jobs: int | None = 1, horizon: int = 10_000, replicates: int = 10) -> CaseReport:
    """Compare Pr[PUR accepts] on the multiset model with the limit formula of ``case``."""
    case = Case(case)
    check_case_hypothesis(case, S)
    m = case_clause_count(case, S, c, n)
    block = 50
    work = [(S, n, m, seed, s, min(block, trials - s)) for s in range(0, trials, block)]
    rows = [r for part in parallel_map(_case_block, work, jobs) for r in part]
    acc = np.array([r[0] for r in rows])
    p1 = np.array([r[1] for r in rows])
    n1 = np.array([r[2] for r in rows])
    hits = int(acc.sum())
    predicted = case_prediction(case, S, c, horizon, seed)
    seeded = None
    if case is not Case.CASE3:
        cum = poly_p_rate(c, S).cumulative(horizon)
        emptied = simulate_emptied(np.repeat(p1, replicates), cum, rng_for(seed, _SEEDED))
        if case is Case.CASE2:
            emptied |= np.repeat(n1 == 0, replicates)
        seeded = float(emptied.mean())
    return CaseReport(case.value, str(S), c, n, m, trials, hits / trials, wilson_interval(hits, trials),
                      predicted, seeded, float(p1.mean()), float(n1.mean()))


# -- the endpoint predictor ------------------------------------------------------------

@dataclass(frozen=True)
class PredictorPoint:
    control: float
    success_rate: float | None
    success_ci: tuple[float, float] | None
    lower_bound: float
    lower_bound_ci: tuple[float, float]
    trials: int


def _predictor_block(args):
    S, n, control, model, decider, seed, start, size = args
    correct = endpoint_ok = 0
    for j in range(start, start + size):
        rng = np.random.default_rng(derive_seed(seed, j))
        F = sample_formula(S, n, control, model, rng)
        pred = endpoint_predictor(F)
        endpoint_ok += pred is Prediction.SAT
        if decider is not None:
            # a satisfying endpoint is a witness, so only unsat predictions need the oracle
            truth = True if pred is Prediction.SAT else decide(F, decider, rng)
            correct += (pred is Prediction.SAT) == truth
    return correct, endpoint_ok


def endpoint_predictor_study(S: ConstraintSet, n: int, controls: Sequence[float], trials: int, seed: int = 0,
                             model=Model.CONST_PROB, decider=None, jobs: int | None = 1) -> list[PredictorPoint]:
    """How often "unsat unless 0^n or 1^n satisfies" is right, per control value.

    The success rate needs ground truth (the oracle by default for n <= 30);
    the lower bound Pr[an endpoint satisfies] needs none.
    """
    model = Model(model)
    if decider is None and n <= ORACLE_MAX_VARS:
        decider = Decider.ORACLE
    if decider is not None:
        decider = Decider(decider)
        check_decider(S, n, decider)
    out = []
    for ci, control in enumerate(controls):
        s = derive_seed(seed, ci)
        work = [(S, n, control, model, decider, s, b, min(250, trials - b)) for b in range(0, trials, 250)]
        parts = parallel_map(_predictor_block, work, jobs)
        correct = sum(p[0] for p in parts)
        ok = sum(p[1] for p in parts)
        out.append(PredictorPoint(
            float(control),
            correct / trials if decider is not None else None,
            wilson_interval(correct, trials) if decider is not None else None,
            ok / trials,
            wilson_interval(ok, trials),
            trials,
        ))
    return out


def endpoint_half_point(S: ConstraintSet, n: int, endpoint: int) -> float:
    """Exact p with Pr[endpoint assignment satisfies a random Omega_p(n) formula] = 1/2.

    ``endpoint=0`` is defeated by all-positive clauses, ``endpoint=1`` by all-negative ones.
    """
    if endpoint == 0:
        killers = sum(math.comb(n, t.positives) for t in S if t.negatives == 0)
    elif endpoint == 1:
        killers = sum(math.comb(n, t.negatives) for t in S if t.positives == 0)
    else:
        raise ValueError("endpoint must be 0 or 1")
    if killers == 0:
        return math.inf
    return -math.expm1(-math.log(2) / killers)


# -- mean-field comparison ----------------------------------------------------------------

@dataclass(frozen=True)
class TrajectoryPoint:
    c: int
    t: int
    i: int
    survivors: int
    mean_P: float
    predicted_P: float
    mean_N: float
    predicted_N: float

    @property
    def rel_error_P(self) -> float:
        return abs(self.mean_P - self.predicted_P) / self.predicted_P if self.predicted_P else math.nan

    @property
    def rel_error_N(self) -> float:
        return abs(self.mean_N - self.predicted_N) / self.predicted_N if self.predicted_N else math.nan


def _trace_block(args):
    S, n, m, depth, seed, start, size = args
    out = []
    for j in range(start, start + size):
        rng = np.random.default_rng(derive_seed(seed, j))
        F = sample_multiset(S, n, m, rng)
        tr = pur(F, trace=True, rng=rng, trace_limit=depth + 1).trace
        out.append([(s.P, s.N) for s in tr.stages])
    return out


def meanfield_agreement(S: ConstraintSet, n: int, m: int, trials: int, depth: int = 20, seed: int = 0,
                        jobs: int | None = 1) -> list[TrajectoryPoint]:
    """Average PUR clause counts over runs still alive at stage n - c, against the mean-field prediction."""
    from .meanfield import mf_trajectory, predicted_counts

    state = mf_trajectory(S, n, m, depth)
    work = [(S, n, m, depth, seed, s, min(50, trials - s)) for s in range(0, trials, 50)]
    traces = [tr for part in parallel_map(_trace_block, work, jobs) for tr in part]
    out = []
    for c in range(1, depth + 1):
        alive = [tr[c] for tr in traces if len(tr) > c]
        for i in range(2, S.k + 1):
            pP, pN = predicted_counts(state, i, n - c)
            mP = float(np.mean([P[i] for P, _ in alive])) if alive else math.nan
            mN = float(np.mean([N[i] for _, N in alive])) if alive else math.nan
            out.append(TrajectoryPoint(c, n - c, i, len(alive), mP, pP, mN, pN))
    return out


# -- sandwich bounds for Horn-or-0-valid sets ------------------------------------------------

@dataclass(frozen=True)
class SandwichPoint:
    control: float
    no_positive_unit: float
    satisfiable: float
    horn_part_satisfiable: float
    trials: int
    cis: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]


def _sandwich_block(args):
    S, n, control, model, seed, start, size = args
    a = b = c = 0
    for j in range(start, start + size):
        rng = np.random.default_rng(derive_seed(seed, j))
        F = sample_formula(S, n, control, model, rng)
        clauses = F.clauses
        a += not any(len(cl) == 1 and cl[0] > 0 for cl in clauses)
        b += oracle_sat(F)
        horn = [cl for cl in clauses if sum(x > 0 for x in cl) <= 1]
        c += oracle_sat(Formula.from_clauses(n, horn)) if horn else 1
    return a, b, c


def sandwich_check(S: ConstraintSet, n: int, controls: Sequence[float], trials: int, seed: int = 0,
                   model=Model.CONST_PROB, jobs: int | None = 1) -> list[SandwichPoint]:
    """Pr[no positive unit] <= Pr[sat] <= Pr[Horn part sat], per control value (exact oracle, n <= 30)."""
    model = Model(model)
    if n > ORACLE_MAX_VARS:
        raise ValueError(f"the sandwich check uses the exact oracle, n <= {ORACLE_MAX_VARS}")
    if not all(t.horn or t.zero_valid for t in S):
        raise ValueError(f"{S} has a template that is neither Horn nor 0-valid")
    out = []
    for ci, control in enumerate(controls):
        s = derive_seed(seed, ci)
        work = [(S, n, control, model, s, b, min(250, trials - b)) for b in range(0, trials, 250)]
        parts = parallel_map(_sandwich_block, work, jobs)
        a, b, c = (sum(p[i] for p in parts) for i in range(3))
        out.append(SandwichPoint(float(control), a / trials, b / trials, c / trials, trials,
                                 tuple(wilson_interval(x, trials) for x in (a, b, c))))
    return out
